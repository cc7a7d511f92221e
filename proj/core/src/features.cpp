#include "motifcrf/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "motifcrf/errors.hpp"
#include "motifcrf/stats.hpp"

namespace motifcrf {

std::vector<double> FeatureVector::values(bool with_accentuation_sd) const {
    std::vector<double> v = {spread_harmonic_complexity,
                             secondary_chord_proportion,
                             key_change_count,
                             pitch_spread,
                             motif_pitch_register,
                             ioi_sd,
                             silence_proportion,
                             metrical_stress_rate,
                             expressive_density,
                             dynamic_variability};
    if (with_accentuation_sd) v.push_back(accentuation_sd);
    return v;
}

std::vector<std::string> feature_names(bool with_accentuation_sd) {
    std::vector<std::string> names = {
        "spread_harmonic_complexity", "secondary_chord_proportion",
        "key_change_count",           "pitch_spread",
        "motif_pitch_register",       "ioi_sd",
        "silence_proportion",         "metrical_stress_rate",
        "expressive_density",         "dynamic_variability"};
    if (with_accentuation_sd) names.push_back("accentuation_sd");
    return names;
}

namespace {

/// Harmony events whose active interval [onset_k, onset_{k+1}) meets
/// [start, end).
std::vector<const HarmonyEvent*> overlapping_harmony(const std::vector<HarmonyEvent>& harmony,
                                                     double start, double end) {
    std::vector<const HarmonyEvent*> out;
    for (std::size_t k = 0; k < harmony.size(); ++k) {
        const double active_start = harmony[k].onset_qn;
        const double active_end = (k + 1 < harmony.size())
                                      ? harmony[k + 1].onset_qn
                                      : std::numeric_limits<double>::infinity();
        if (active_start < end - kOnsetTol && active_end > start + kOnsetTol)
            out.push_back(&harmony[k]);
    }
    return out;
}

double union_length(std::vector<std::pair<double, double>> intervals) {
    std::sort(intervals.begin(), intervals.end());
    double total = 0.0;
    double cur_start = 0.0, cur_end = -std::numeric_limits<double>::infinity();
    bool open = false;
    for (const auto& [s, e] : intervals) {
        if (!open || s > cur_end) {
            if (open) total += cur_end - cur_start;
            cur_start = s;
            cur_end = e;
            open = true;
        } else {
            cur_end = std::max(cur_end, e);
        }
    }
    if (open) total += cur_end - cur_start;
    return total;
}

}  // namespace

FeatureVector compute_instance_features(const MotifInstance& instance, const Movement& movement,
                                        const FeaturesConfig& cfg) {
    std::vector<NoteEvent> notes;
    for (long nid : instance.note_ids) notes.push_back(*movement.find_note(nid));
    if (notes.empty()) throw EmptySequence("instance without notes");

    double start = notes.front().onset_qn;
    double end = -std::numeric_limits<double>::infinity();
    for (const auto& n : notes) end = std::max(end, n.offset_qn());
    const double span = end - start;

    FeatureVector f;

    const auto overlapping = overlapping_harmony(movement.harmony, start, end);
    if (overlapping.empty())
        throw HarmonyGap("no harmony covers instance " + std::to_string(instance.instance_id));
    double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
    int secondary = 0, key_changes = 0;
    for (std::size_t k = 0; k < overlapping.size(); ++k) {
        cmin = std::min(cmin, overlapping[k]->complexity);
        cmax = std::max(cmax, overlapping[k]->complexity);
        if (overlapping[k]->is_secondary) ++secondary;
        if (k > 0 && overlapping[k]->local_key != overlapping[k - 1]->local_key) ++key_changes;
    }
    f.spread_harmonic_complexity = cmax - cmin;
    f.secondary_chord_proportion =
        static_cast<double>(secondary) / static_cast<double>(overlapping.size());
    f.key_change_count = static_cast<double>(key_changes) / span;

    std::vector<double> pitches, onsets, dynamics, marks, beats;
    for (const auto& n : notes) {
        pitches.push_back(n.midi_pitch);
        onsets.push_back(n.onset_qn);
        dynamics.push_back(n.dynamic_level);
        marks.push_back(n.expressive_marks);
        beats.push_back(n.beat);
    }
    f.pitch_spread = *std::max_element(pitches.begin(), pitches.end()) -
                     *std::min_element(pitches.begin(), pitches.end());

    const HarmonyEvent& at_onset = harmony_at(movement.harmony, start);
    f.motif_pitch_register =
        stats::median(pitches) - (60.0 + tonic_pitch_class(at_onset.local_key));

    if (notes.size() >= 3) {
        std::vector<double> iois;
        for (std::size_t k = 1; k < onsets.size(); ++k) iois.push_back(onsets[k] - onsets[k - 1]);
        f.ioi_sd = stats::population_sd(iois);
    }

    std::vector<std::pair<double, double>> sounded;
    for (const auto& n : notes) sounded.push_back({n.onset_qn, n.offset_qn()});
    f.silence_proportion = 1.0 - union_length(std::move(sounded)) / span;
    f.silence_proportion = std::clamp(f.silence_proportion, 0.0, 1.0);

    double stress = 0.0;
    for (double b : beats) {
        if (std::fabs(b - 1.0) <= kOnsetTol)
            stress += cfg.weight_downbeat;
        else if (std::fabs(b - std::round(b)) <= kOnsetTol)
            stress += cfg.weight_onbeat;
        else
            stress += cfg.weight_offbeat;
    }
    f.metrical_stress_rate = stress / static_cast<double>(notes.size());

    double mark_sum = 0.0;
    for (double m : marks) mark_sum += m;
    f.expressive_density = mark_sum / static_cast<double>(notes.size());
    f.dynamic_variability = stats::population_sd(dynamics);
    f.accentuation_sd = stats::population_sd(marks);

    return f;
}

DesignMatrix build_design_matrix(const Eigen::MatrixXd& raw,
                                 const std::vector<std::string>& names) {
    const Eigen::Index n = raw.rows();
    const Eigen::Index p = raw.cols();

    DesignMatrix out;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = raw.col(j).mean();
        const double sd = std::sqrt((raw.col(j).array() - mean).square().sum() /
                                    static_cast<double>(n));
        if (sd < 1e-12) {
            out.dropped_columns.push_back(names[j]);
            continue;
        }
        kept.push_back(j);
        out.column_names.push_back(names[j]);
        out.means.push_back(mean);
        out.sds.push_back(sd);
    }

    out.X.resize(n, 1 + static_cast<Eigen::Index>(kept.size()));
    out.X.col(0).setOnes();
    for (std::size_t k = 0; k < kept.size(); ++k)
        out.X.col(1 + static_cast<Eigen::Index>(k)) =
            (raw.col(kept[k]).array() - out.means[k]) / out.sds[k];
    return out;
}

}  // namespace motifcrf
