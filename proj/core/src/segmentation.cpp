#include "motifcrf/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "motifcrf/errors.hpp"

namespace motifcrf {

std::string to_string(BoundaryCue cue) {
    switch (cue) {
        case BoundaryCue::Silence: return "silence";
        case BoundaryCue::RepeatedPitch: return "repeated_pitch";
        case BoundaryCue::Cadential: return "cadential";
    }
    return "?";
}

MeasureMap::MeasureMap(const Movement& movement) {
    std::map<int, double> first_onset;   // measure -> earliest onset
    for (const auto& n : movement.notes) {
        auto it = first_onset.find(n.measure);
        if (it == first_onset.end() || n.onset_qn < it->second)
            first_onset[n.measure] = n.onset_qn;
    }
    double prev = -1.0;
    for (const auto& [m, onset] : first_onset) {
        const double start = std::max(onset, prev);   // keep knots monotone
        starts_.push_back(start);
        measures_.push_back(static_cast<double>(m));
        prev = start;
    }
}

double MeasureMap::measure_position(double t) const {
    if (starts_.empty()) return 1.0;
    if (starts_.size() == 1) return measures_[0];

    std::size_t hi = 1;
    while (hi + 1 < starts_.size() && starts_[hi] <= t) ++hi;
    const std::size_t lo = hi - 1;
    const double dt = starts_[hi] - starts_[lo];
    if (dt <= 0) return measures_[lo];
    // linear inter/extrapolation through the bracketing knots
    return measures_[lo] + (measures_[hi] - measures_[lo]) * (t - starts_[lo]) / dt;
}

std::vector<BoundaryCandidate> propose_boundaries(const Movement& movement,
                                                  const SegmentationConfig& config) {
    if (movement.notes.empty()) throw EmptyMovement("movement " + movement.movement_id);

    const double span_start = movement.span_start_qn();
    const double span_end = movement.span_end_qn();
    std::vector<BoundaryCandidate> out;

    // (i) true-silence gaps: no voice sounding over >= silence_min_qn
    {
        std::vector<std::pair<double, double>> sounded;
        for (const auto& n : movement.notes) sounded.push_back({n.onset_qn, n.offset_qn()});
        std::sort(sounded.begin(), sounded.end());
        double covered_end = sounded.front().second;
        for (const auto& [s, e] : sounded) {
            if (s > covered_end + kOnsetTol) {
                if (s - covered_end >= config.silence_min_qn - kOnsetTol)
                    out.push_back({covered_end, BoundaryCue::Silence});
                covered_end = e;
            } else {
                covered_end = std::max(covered_end, e);
            }
        }
    }

    // (ii) consecutive same-pitch notes with onsets >= 1 qn apart;
    //      boundary after the second note
    for (std::size_t i = 1; i < movement.notes.size(); ++i) {
        const auto& a = movement.notes[i - 1];
        const auto& b = movement.notes[i];
        if (a.midi_pitch == b.midi_pitch && b.onset_qn - a.onset_qn >= 1.0 - kOnsetTol)
            out.push_back({b.offset_qn(), BoundaryCue::RepeatedPitch});
    }

    // (iii) cadential proxy: harmony function zone moves D -> T
    if (config.cadential_cue) {
        for (std::size_t i = 1; i < movement.harmony.size(); ++i)
            if (movement.harmony[i - 1].function_zone == FunctionZone::Dominant &&
                movement.harmony[i].function_zone == FunctionZone::Tonic)
                out.push_back({movement.harmony[i].onset_qn, BoundaryCue::Cadential});
    }

    // keep candidates strictly inside the movement span
    std::erase_if(out, [&](const BoundaryCandidate& c) {
        return c.onset_qn <= span_start + kOnsetTol || c.onset_qn >= span_end - kOnsetTol;
    });

    std::sort(out.begin(), out.end(), [](const BoundaryCandidate& a, const BoundaryCandidate& b) {
        if (a.onset_qn != b.onset_qn) return a.onset_qn < b.onset_qn;
        return static_cast<int>(a.cue) < static_cast<int>(b.cue);
    });

    // dedupe at onset tolerance, strongest cue wins
    std::vector<BoundaryCandidate> dedup;
    for (const auto& c : out) {
        if (!dedup.empty() && std::fabs(c.onset_qn - dedup.back().onset_qn) <= kOnsetTol) continue;
        dedup.push_back(c);
    }
    return dedup;
}

namespace {

struct Span {
    double start, end;
};

std::vector<Span> instance_spans(const Movement& movement) {
    std::vector<Span> spans;
    for (const auto& inst : movement.instances) {
        double s = std::numeric_limits<double>::infinity();
        double e = -std::numeric_limits<double>::infinity();
        for (long nid : inst.note_ids) {
            const NoteEvent* n = movement.find_note(nid);
            s = std::min(s, n->onset_qn);
            e = std::max(e, n->offset_qn());
        }
        spans.push_back({s, e});
    }
    return spans;
}

}  // namespace

std::vector<BoundaryCandidate> filter_boundaries(const std::vector<BoundaryCandidate>& candidates,
                                                 const Movement& movement,
                                                 const MeasureMap& measure_map,
                                                 const SegmentationConfig& config) {
    const auto spans = instance_spans(movement);

    std::vector<BoundaryCandidate> surviving;
    for (const auto& c : candidates) {
        bool inside = false;
        for (const auto& sp : spans)
            if (c.onset_qn > sp.start + kOnsetTol && c.onset_qn < sp.end - kOnsetTol) {
                inside = true;
                break;
            }
        if (!inside) surviving.push_back(c);
    }

    std::vector<BoundaryCandidate> kept;
    std::size_t i = 0;
    while (i < surviving.size()) {
        const double prev_mpos =
            kept.empty() ? -std::numeric_limits<double>::infinity()
                         : measure_map.measure_position(kept.back().onset_qn);
        // earliest candidate far enough from the previous kept boundary
        while (i < surviving.size() &&
               measure_map.measure_position(surviving[i].onset_qn) - prev_mpos <
                   config.min_span_measures - kOnsetTol)
            ++i;
        if (i == surviving.size()) break;

        // candidates within the proximity window compete on cue strength
        const double window_end =
            measure_map.measure_position(surviving[i].onset_qn) + config.proximity_measures;
        std::size_t best = i;
        bool best_preferred = surviving[i].cue != BoundaryCue::Cadential;
        for (std::size_t j = i + 1;
             j < surviving.size() &&
             measure_map.measure_position(surviving[j].onset_qn) <= window_end + kOnsetTol;
             ++j) {
            const bool preferred = surviving[j].cue != BoundaryCue::Cadential;
            if (preferred && !best_preferred) {
                best = j;
                best_preferred = true;
            }
        }
        kept.push_back(surviving[best]);
        i = best + 1;
    }
    return kept;
}

SegmentationResult segment_corpus(Corpus& corpus, const SegmentationConfig& config) {
    SegmentationResult result;
    for (auto& [id, mv] : corpus.movements) {
        const MeasureMap mmap(mv);
        const auto boundaries = filter_boundaries(propose_boundaries(mv, config), mv, mmap, config);

        const double span_start = mv.span_start_qn();
        const double span_end = mv.span_end_qn();
        std::vector<Segment> segs;
        double cur = span_start;
        for (const auto& b : boundaries) {
            segs.push_back({static_cast<int>(segs.size()), id, cur, b.onset_qn, {}});
            cur = b.onset_qn;
        }
        segs.push_back({static_cast<int>(segs.size()), id, cur, span_end, {}});

        if (segs.size() > 1) {
            const auto& last = segs.back();
            if (mmap.measure_position(last.end_qn) - mmap.measure_position(last.start_qn) <
                config.min_span_measures)
                result.diagnostics.push_back({id, "segment " + std::to_string(last.segment_id),
                                              "trailing segment shorter than minimum span"});
        }

        for (auto& inst : mv.instances) {
            const double first_onset = mv.find_note(inst.note_ids.front())->onset_qn;
            double last_offset = 0.0;
            for (long nid : inst.note_ids)
                last_offset = std::max(last_offset, mv.find_note(nid)->offset_qn());
            int sid = static_cast<int>(segs.size()) - 1;
            for (std::size_t k = 0; k + 1 < segs.size(); ++k)
                if (first_onset < segs[k].end_qn - kOnsetTol) {
                    sid = static_cast<int>(k);
                    break;
                }
            inst.segment_id = sid;
            segs[sid].member_instance_ids.push_back(inst.instance_id);
            if (last_offset > segs[sid].end_qn + kOnsetTol)
                result.diagnostics.push_back({id, "instance " + std::to_string(inst.instance_id),
                                              "instance straddles a segment boundary"});
        }
        result.segments[id] = std::move(segs);
    }
    return result;
}

}  // namespace motifcrf
