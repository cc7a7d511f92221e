#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "motifcrf/align_label.hpp"
#include "motifcrf/crf.hpp"
#include "motifcrf/features.hpp"
#include "motifcrf/graph.hpp"
#include "motifcrf/inference.hpp"
#include "motifcrf/segmentation.hpp"
#include "motifcrf/simulate.hpp"

namespace motifcrf {

/// Every tunable of the pipeline with its default. The canonical
/// serialization (echo) is embedded into each emitted artifact.
struct RunConfig {
    // graph
    double sigma = 1.0;
    double prune_threshold = 1e-5;
    // crf fitting
    double lambda_alpha = 1e-3;
    double lambda_beta = 1e-3;
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    // inference
    int B = 1000;
    std::uint64_t seed = 0;
    double fdr_level = 0.05;
    bool use_t_reference = false;
    bool per_instance_scores = false;
    bool clr_warm_start = false;
    // segmentation
    double min_span_measures = 8.0;
    double silence_min_qn = 1.0;
    bool cadential_cue = true;
    double proximity_measures = 1.0;
    // alignment and labeling
    int leap_threshold = 5;
    bool contour_strict = true;
    double w_pitch = 1.0;
    double w_beat = 0.5;
    double w_duration = 0.5;
    double gap_penalty = 4.0;
    double pitch_tol = 0.0;
    double identity_rel_tol = 1e-6;
    double rhythm_rel_tol = 1e-3;
    // features
    bool use_accentuation_sd = false;
    double metrical_weight_downbeat = 3.0;
    double metrical_weight_onbeat = 2.0;
    double metrical_weight_offbeat = 1.0;
    // simulate stage
    int sim_n_segments = 50;
    int sim_instances_min = 8;
    int sim_instances_max = 8;
    int sim_q = 3;
    int sim_p = 3;
    int sim_burn_in = 200;
    int sim_thinning = 5;
    double sim_coeff_scale = 1.0;
    // period filter (empty: all movements)
    std::string period;

    /// Flat key=value text file; '#' starts a comment. Unknown keys fail.
    static RunConfig from_file(const std::filesystem::path& path);
    void set(const std::string& key, const std::string& value);

    /// Range checks on every tunable; throws Error on violations.
    void validate() const;

    /// Canonical "key=value" serialization, sorted by key.
    std::string echo() const;

    SegmentationConfig segmentation_config() const;
    AlignConfig align_config() const;
    LabelConfig label_config() const;
    FeaturesConfig features_config() const;
    GraphConfig graph_config() const;
    FitConfig fit_config() const;
    ClrConfig clr_config() const;
    SimConfig sim_config() const;   // true params derived from seed
};

enum class Stage {
    Ingest,
    Segment,
    Label,
    Features,
    Graph,
    Fit,
    Infer,
    ClrTest,
    Simulate,
    Report,
    All,
};

Stage stage_from_string(const std::string& name);
std::string to_string(Stage stage);

/// Runs one stage: reads the raw corpus from in_dir and artifacts from
/// out_dir, writes this stage's artifacts into out_dir. Throws on error;
/// MissingArtifact signals a usage problem (exit code 2 at the CLI).
void run_stage(Stage stage, const RunConfig& config, const std::filesystem::path& in_dir,
               const std::filesystem::path& out_dir);

/// Model-ready dataset assembled from the on-disk artifacts.
struct ModelData {
    Eigen::MatrixXd X;                        // bias + standardized kept columns
    Eigen::MatrixXd Y;                        // N x 8 labels
    BlockDiagonal adjacency;
    std::vector<int> segment_of;
    int n_segments = 0;
    std::vector<std::string> feature_names;   // kept, aligned to X cols 1..
    std::vector<std::string> label_names_;    // label report names
    std::vector<std::string> row_movement;    // provenance per row
    std::vector<long> row_instance;
};

ModelData load_model_data(const std::filesystem::path& out_dir);

/// Report-facing name of a labels.csv column: the standard eight map to
/// their display names ("y_note_edit" -> "Note Edit"), anything else
/// passes through.
std::string display_label_name(const std::string& column);

/// Loads the corpus from in_dir (notes/harmony/motifs.csv) and applies
/// the optional period filter via manifest.csv.
Corpus load_corpus_dir(const std::filesystem::path& in_dir, const RunConfig& config);

}  // namespace motifcrf
