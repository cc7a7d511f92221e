#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "motifcrf/score_model.hpp"

namespace motifcrf {

/// Motif-level descriptors, one row per instance. Order is fixed and is
/// also the features.csv column order.
struct FeatureVector {
    double spread_harmonic_complexity = 0.0;
    double secondary_chord_proportion = 0.0;
    double key_change_count = 0.0;        // changes per quarter note of span
    double pitch_spread = 0.0;
    double motif_pitch_register = 0.0;    // median pitch minus octave-4 tonic
    double ioi_sd = 0.0;
    double silence_proportion = 0.0;
    double metrical_stress_rate = 0.0;
    double expressive_density = 0.0;
    double dynamic_variability = 0.0;
    double accentuation_sd = 0.0;         // optional eleventh feature

    std::vector<double> values(bool with_accentuation_sd) const;
};

std::vector<std::string> feature_names(bool with_accentuation_sd);

struct FeaturesConfig {
    bool use_accentuation_sd = false;
    // metrical weight table: downbeat / other integer beat / off-beat
    double weight_downbeat = 3.0;
    double weight_onbeat = 2.0;
    double weight_offbeat = 1.0;
};

FeatureVector compute_instance_features(const MotifInstance& instance, const Movement& movement,
                                        const FeaturesConfig& config);

/// Bias column plus z-standardized feature columns. Constant columns are
/// dropped and reported so raw-unit effects stay recoverable.
struct DesignMatrix {
    Eigen::MatrixXd X;                        // N x (1 + kept), column 0 all ones
    std::vector<std::string> column_names;    // kept feature names, X columns 1..
    std::vector<double> means;                // per kept column, raw units
    std::vector<double> sds;                  // per kept column, population SD
    std::vector<std::string> dropped_columns;
};

/// raw is N x p in feature_names order.
DesignMatrix build_design_matrix(const Eigen::MatrixXd& raw,
                                 const std::vector<std::string>& names);

}  // namespace motifcrf
