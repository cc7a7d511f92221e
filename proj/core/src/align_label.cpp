#include "motifcrf/align_label.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "motifcrf/errors.hpp"

namespace motifcrf {

const std::array<std::string, kNumLabels>& label_names() {
    static const std::array<std::string, kNumLabels> names = {
        "Identity",  "Contour", "Salient Leap", "Rhythm",
        "Note Edit", "Harmony", "Intervallic",  "Symmetry"};
    return names;
}

const std::array<std::string, kNumLabels>& label_column_names() {
    static const std::array<std::string, kNumLabels> names = {
        "y_identity",  "y_contour", "y_salient_leap", "y_rhythm",
        "y_note_edit", "y_harmony", "y_intervallic",  "y_symmetry"};
    return names;
}

LabelVector self_anchor_labels() {
    LabelVector v;
    v[kIdentity] = 1;
    return v;
}

std::vector<NoteEvent> notes_of(const Movement& movement, const MotifInstance& instance) {
    std::vector<NoteEvent> notes;
    notes.reserve(instance.note_ids.size());
    for (long nid : instance.note_ids) notes.push_back(*movement.find_note(nid));
    return notes;
}

namespace {

double match_cost(const NoteEvent& a, const NoteEvent& b, const AlignConfig& cfg) {
    return cfg.w_pitch * std::fabs(a.midi_pitch - b.midi_pitch) +
           cfg.w_beat * std::fabs(a.beat - b.beat) +
           cfg.w_duration * std::fabs(a.duration_qn - b.duration_qn);
}

}  // namespace

namespace {

constexpr double kUnreachable = 1e300;

}  // namespace

// Three-state dynamic program over (consumed anchor, consumed instance).
// A deletion may not directly follow an insertion or vice versa: an
// opposite-side gap pair would shadow a substitution, and the alignment
// of two single notes must be the match pair.
Alignment align_dp(const std::vector<NoteEvent>& anchor_notes,
                   const std::vector<NoteEvent>& instance_notes, const AlignConfig& cfg) {
    const std::size_t m = anchor_notes.size();
    const std::size_t n = instance_notes.size();
    enum State { kMatch = 0, kDelete = 1, kInsert = 2 };   // last emitted pair

    std::vector<std::array<double, 3>> cells((m + 1) * (n + 1),
                                             {kUnreachable, kUnreachable, kUnreachable});
    const auto at = [&](std::size_t i, std::size_t j) -> std::array<double, 3>& {
        return cells[i * (n + 1) + j];
    };
    at(0, 0)[kMatch] = 0.0;   // empty prefix behaves like a match for transitions

    for (std::size_t i = 0; i <= m; ++i)
        for (std::size_t j = 0; j <= n; ++j) {
            if (i > 0 && j > 0) {
                const auto& prev = at(i - 1, j - 1);
                const double best = std::min({prev[kMatch], prev[kDelete], prev[kInsert]});
                at(i, j)[kMatch] =
                    best + match_cost(anchor_notes[i - 1], instance_notes[j - 1], cfg);
            }
            if (i > 0) {
                const auto& prev = at(i - 1, j);
                at(i, j)[kDelete] =
                    std::min(prev[kMatch], prev[kDelete]) + cfg.gap_penalty;
            }
            if (j > 0) {
                const auto& prev = at(i, j - 1);
                at(i, j)[kInsert] =
                    std::min(prev[kMatch], prev[kInsert]) + cfg.gap_penalty;
            }
        }

    // ties prefer matches, then anchor-side gaps (instance insertions)
    const auto pick = [](const std::array<double, 3>& cell, bool allow_delete,
                         bool allow_insert) {
        int best = kMatch;
        double value = cell[kMatch];
        if (allow_insert && cell[kInsert] < value) {
            best = kInsert;
            value = cell[kInsert];
        }
        if (allow_delete && cell[kDelete] < value) {
            best = kDelete;
            value = cell[kDelete];
        }
        return best;
    };

    Alignment out;
    std::size_t i = m, j = n;
    int state = pick(at(i, j), true, true);
    out.cost = at(i, j)[state];
    while (i > 0 || j > 0) {
        if (state == kMatch) {
            out.pairs.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1)});
            --i;
            --j;
            state = pick(at(i, j), true, true);
        } else if (state == kDelete) {
            out.pairs.push_back({static_cast<int>(i - 1), kGap});
            --i;
            state = pick(at(i, j), true, false);
        } else {
            out.pairs.push_back({kGap, static_cast<int>(j - 1)});
            --j;
            state = pick(at(i, j), false, true);
        }
    }
    std::reverse(out.pairs.begin(), out.pairs.end());
    return out;
}

Alignment align_instances(const std::vector<NoteEvent>& anchor_notes,
                          const std::vector<NoteEvent>& instance_notes, const AlignConfig& cfg) {
    if (anchor_notes.empty() || instance_notes.empty())
        throw EmptySequence("align_instances: empty note sequence");

    if (anchor_notes.size() == instance_notes.size()) {
        bool simple = true;
        for (std::size_t k = 0; k < anchor_notes.size(); ++k)
            if (std::fabs(anchor_notes[k].midi_pitch - instance_notes[k].midi_pitch) >
                cfg.pitch_tol) {
                simple = false;
                break;
            }
        if (simple) {
            Alignment out;
            for (std::size_t k = 0; k < anchor_notes.size(); ++k) {
                out.pairs.push_back({static_cast<int>(k), static_cast<int>(k)});
                out.cost += match_cost(anchor_notes[k], instance_notes[k], cfg);
            }
            return out;
        }
    }
    return align_dp(anchor_notes, instance_notes, cfg);
}

namespace {

struct MatchedView {
    std::vector<int> pitch_a, pitch_b;
    std::vector<double> onset_a, onset_b, dur_a, dur_b;
    bool has_gaps = false;
};

MatchedView matched_view(const std::vector<NoteEvent>& a, const std::vector<NoteEvent>& b,
                         const Alignment& al) {
    MatchedView v;
    for (const auto& [ia, ib] : al.pairs) {
        if (ia == kGap || ib == kGap) {
            v.has_gaps = true;
            continue;
        }
        v.pitch_a.push_back(a[ia].midi_pitch);
        v.pitch_b.push_back(b[ib].midi_pitch);
        v.onset_a.push_back(a[ia].onset_qn);
        v.onset_b.push_back(b[ib].onset_qn);
        v.dur_a.push_back(a[ia].duration_qn);
        v.dur_b.push_back(b[ib].duration_qn);
    }
    return v;
}

int sign_of(int x) { return (x > 0) - (x < 0); }

std::vector<int> intervals(const std::vector<int>& pitches) {
    std::vector<int> out;
    for (std::size_t k = 1; k < pitches.size(); ++k) out.push_back(pitches[k] - pitches[k - 1]);
    return out;
}

/// Single-scalar proportionality of two nonnegative sequences.
bool proportional(const std::vector<double>& xs, const std::vector<double>& ys, double rel_tol) {
    double sx = 0.0, sy = 0.0;
    for (double x : xs) sx += x;
    for (double y : ys) sy += y;
    if (sx <= 0.0 || sy <= 0.0) {
        // degenerate: proportional only if both sides are all zero
        return sx <= 0.0 && sy <= 0.0;
    }
    const double c = sy / sx;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double denom = std::max(c * xs[k], ys[k]);
        if (denom == 0.0) continue;
        if (std::fabs(ys[k] - c * xs[k]) > rel_tol * denom) return false;
    }
    return true;
}

bool evaluate_identity(const MatchedView& v, const LabelConfig& cfg) {
    if (v.has_gaps || v.pitch_a.empty()) return false;
    for (std::size_t k = 0; k < v.pitch_a.size(); ++k)
        if (v.pitch_a[k] != v.pitch_b[k]) return false;
    return proportional(v.dur_a, v.dur_b, cfg.identity_rel_tol);
}

bool evaluate_note_edit(const std::vector<NoteEvent>& a, const std::vector<NoteEvent>& b,
                        const Alignment& al) {
    for (std::size_t g = 0; g < al.pairs.size(); ++g) {
        const auto& [ia, ib] = al.pairs[g];
        if (ia != kGap && ib != kGap) continue;
        const bool instance_side = (ia == kGap);
        const int gap_pitch = instance_side ? b[ib].midi_pitch : a[ia].midi_pitch;
        // nearest matched pairs around the gap, read on the gap's own side
        bool differs_prev = true, differs_next = true;
        for (std::size_t k = g; k-- > 0;) {
            const auto& [pa, pb] = al.pairs[k];
            if (pa == kGap || pb == kGap) continue;
            differs_prev = gap_pitch != (instance_side ? b[pb].midi_pitch : a[pa].midi_pitch);
            break;
        }
        for (std::size_t k = g + 1; k < al.pairs.size(); ++k) {
            const auto& [pa, pb] = al.pairs[k];
            if (pa == kGap || pb == kGap) continue;
            differs_next = gap_pitch != (instance_side ? b[pb].midi_pitch : a[pa].midi_pitch);
            break;
        }
        if (differs_prev && differs_next) return true;
    }
    return false;
}

}  // namespace

LabelVector evaluate_labels(const std::vector<NoteEvent>& anchor_notes,
                            const std::vector<NoteEvent>& instance_notes,
                            const Alignment& alignment,
                            const std::vector<HarmonyEvent>& harmony_track,
                            const LabelConfig& cfg) {
    const MatchedView v = matched_view(anchor_notes, instance_notes, alignment);
    const auto ints_a = intervals(v.pitch_a);
    const auto ints_b = intervals(v.pitch_b);

    LabelVector out;

    out[kIdentity] = evaluate_identity(v, cfg) ? 1 : 0;

    if (!ints_a.empty()) {
        bool signs_equal = true;
        bool any_size_differs = false;
        for (std::size_t k = 0; k < ints_a.size(); ++k) {
            if (sign_of(ints_a[k]) != sign_of(ints_b[k])) signs_equal = false;
            if (ints_a[k] != ints_b[k]) any_size_differs = true;
        }
        out[kContour] = (signs_equal && (any_size_differs || !cfg.contour_strict)) ? 1 : 0;

        bool leaps_ok = true;
        int leap_count = 0;
        for (std::size_t k = 0; k < ints_a.size(); ++k) {
            if (std::abs(ints_a[k]) < cfg.leap_threshold) continue;
            ++leap_count;
            if (std::abs(ints_b[k]) < cfg.leap_threshold ||
                sign_of(ints_a[k]) != sign_of(ints_b[k]))
                leaps_ok = false;
        }
        out[kSalientLeap] = (leap_count >= 1 && leaps_ok) ? 1 : 0;

        bool congruent = true;
        for (std::size_t k = 0; k < ints_a.size(); ++k)
            if ((ints_a[k] - ints_b[k]) % 12 != 0 || sign_of(ints_a[k]) != sign_of(ints_b[k]))
                congruent = false;
        out[kIntervallic] = congruent ? 1 : 0;

        bool negated = true;
        for (std::size_t k = 0; k < ints_a.size(); ++k)
            if (ints_b[k] != -ints_a[k]) negated = false;
        auto multiset_a = ints_a;
        auto multiset_b = ints_b;
        std::sort(multiset_a.begin(), multiset_a.end());
        std::sort(multiset_b.begin(), multiset_b.end());
        const bool permuted = multiset_a == multiset_b && out[kIdentity] == 0;
        out[kSymmetry] = (negated || permuted) ? 1 : 0;
    }

    if (v.onset_a.size() >= 2) {
        std::vector<double> ioi_a, ioi_b;
        for (std::size_t k = 1; k < v.onset_a.size(); ++k) {
            ioi_a.push_back(v.onset_a[k] - v.onset_a[k - 1]);
            ioi_b.push_back(v.onset_b[k] - v.onset_b[k - 1]);
        }
        out[kRhythm] = proportional(ioi_a, ioi_b, cfg.rhythm_rel_tol) ? 1 : 0;
    }

    if (!v.onset_a.empty()) {
        bool zones_equal = true;
        for (std::size_t k = 0; k < v.onset_a.size(); ++k)
            if (zone_at(harmony_track, v.onset_a[k]) != zone_at(harmony_track, v.onset_b[k]))
                zones_equal = false;
        out[kHarmony] = zones_equal ? 1 : 0;
    }

    out[kNoteEdit] = evaluate_note_edit(anchor_notes, instance_notes, alignment) ? 1 : 0;

    return out;
}

void select_anchors(Corpus& corpus, std::map<std::string, std::map<long, long>>& anchor_of) {
    for (auto& [mv_id, mv] : corpus.movements) {
        auto& refs = anchor_of[mv_id];
        // instances are already in (onset, class, instance) order and carry
        // segment ids; walk segments in ascending order
        std::map<int, std::vector<MotifInstance*>> by_segment;
        for (auto& inst : mv.instances) by_segment[inst.segment_id].push_back(&inst);

        std::map<long, long> latest_anchor;   // class -> anchor from preceding segments
        for (auto& [seg_id, members] : by_segment) {
            std::map<long, std::vector<MotifInstance*>> by_class;
            for (auto* inst : members) by_class[inst->motif_class_id].push_back(inst);

            for (auto& [class_id, group] : by_class) {
                MotifInstance* anchor = group.front();   // earliest onset in the segment
                anchor->is_anchor = true;
                if (group.size() == 1) {
                    auto prev = latest_anchor.find(class_id);
                    refs[anchor->instance_id] =
                        prev != latest_anchor.end() ? prev->second : anchor->instance_id;
                } else {
                    refs[anchor->instance_id] = anchor->instance_id;
                    for (std::size_t k = 1; k < group.size(); ++k)
                        refs[group[k]->instance_id] = anchor->instance_id;
                }
            }
            // anchors become visible to later segments only
            for (auto& [class_id, group] : by_class)
                latest_anchor[class_id] = group.front()->instance_id;
        }
    }
}

LabelingResult label_corpus(Corpus& corpus, const AlignConfig& align_config,
                            const LabelConfig& label_config) {
    std::map<std::string, std::map<long, long>> anchor_of;
    select_anchors(corpus, anchor_of);

    LabelingResult result;
    for (auto& [mv_id, mv] : corpus.movements) {
        auto& rows = result.rows[mv_id];
        for (const auto& inst : mv.instances) {
            LabeledInstance row;
            row.segment_id = inst.segment_id;
            row.anchor_instance_id = anchor_of[mv_id][inst.instance_id];
            if (row.anchor_instance_id == inst.instance_id) {
                row.labels = self_anchor_labels();
            } else {
                const MotifInstance* anchor = nullptr;
                for (const auto& cand : mv.instances)
                    if (cand.instance_id == row.anchor_instance_id) {
                        anchor = &cand;
                        break;
                    }
                const auto anchor_notes = notes_of(mv, *anchor);
                const auto inst_notes = notes_of(mv, inst);
                const auto al = align_instances(anchor_notes, inst_notes, align_config);
                row.labels =
                    evaluate_labels(anchor_notes, inst_notes, al, mv.harmony, label_config);
            }
            rows[inst.instance_id] = row;
        }
    }
    return result;
}

}  // namespace motifcrf
