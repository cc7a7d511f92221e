#include "motifcrf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "motifcrf/csv.hpp"
#include "motifcrf/errors.hpp"
#include "motifcrf/rng.hpp"
#include "motifcrf/stats.hpp"

namespace motifcrf {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// RunConfig

namespace {

bool parse_flag(const std::string& v) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw Error("expected boolean 0/1, got '" + v + "'");
}

double parse_num(const std::string& v) {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw Error("bad number '" + v + "'");
    return x;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "sigma") sigma = parse_num(value);
    else if (key == "prune_threshold") prune_threshold = parse_num(value);
    else if (key == "lambda_alpha") lambda_alpha = parse_num(value);
    else if (key == "lambda_beta") lambda_beta = parse_num(value);
    else if (key == "max_iterations") max_iterations = static_cast<int>(parse_num(value));
    else if (key == "gradient_tolerance") gradient_tolerance = parse_num(value);
    else if (key == "B") B = static_cast<int>(parse_num(value));
    else if (key == "seed") seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "fdr_level") fdr_level = parse_num(value);
    else if (key == "use_t_reference") use_t_reference = parse_flag(value);
    else if (key == "per_instance_scores") per_instance_scores = parse_flag(value);
    else if (key == "clr_warm_start") clr_warm_start = parse_flag(value);
    else if (key == "min_span_measures") min_span_measures = parse_num(value);
    else if (key == "silence_min_qn") silence_min_qn = parse_num(value);
    else if (key == "cadential_cue") cadential_cue = parse_flag(value);
    else if (key == "proximity_measures") proximity_measures = parse_num(value);
    else if (key == "leap_threshold") leap_threshold = static_cast<int>(parse_num(value));
    else if (key == "contour_strict") contour_strict = parse_flag(value);
    else if (key == "w_pitch") w_pitch = parse_num(value);
    else if (key == "w_beat") w_beat = parse_num(value);
    else if (key == "w_duration") w_duration = parse_num(value);
    else if (key == "gap_penalty") gap_penalty = parse_num(value);
    else if (key == "pitch_tol") pitch_tol = parse_num(value);
    else if (key == "identity_rel_tol") identity_rel_tol = parse_num(value);
    else if (key == "rhythm_rel_tol") rhythm_rel_tol = parse_num(value);
    else if (key == "use_accentuation_sd") use_accentuation_sd = parse_flag(value);
    else if (key == "metrical_weight_downbeat") metrical_weight_downbeat = parse_num(value);
    else if (key == "metrical_weight_onbeat") metrical_weight_onbeat = parse_num(value);
    else if (key == "metrical_weight_offbeat") metrical_weight_offbeat = parse_num(value);
    else if (key == "sim_n_segments") sim_n_segments = static_cast<int>(parse_num(value));
    else if (key == "sim_instances_min") sim_instances_min = static_cast<int>(parse_num(value));
    else if (key == "sim_instances_max") sim_instances_max = static_cast<int>(parse_num(value));
    else if (key == "sim_q") sim_q = static_cast<int>(parse_num(value));
    else if (key == "sim_p") sim_p = static_cast<int>(parse_num(value));
    else if (key == "sim_burn_in") sim_burn_in = static_cast<int>(parse_num(value));
    else if (key == "sim_thinning") sim_thinning = static_cast<int>(parse_num(value));
    else if (key == "sim_coeff_scale") sim_coeff_scale = parse_num(value);
    else if (key == "period") period = value;
    else throw Error("unknown config key '" + key + "'");
}

RunConfig RunConfig::from_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("cannot open config " + path.string());
    RunConfig cfg;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        // trim
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw MalformedRow(path.string(), lineno, "expected key=value");
        try {
            cfg.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const Error& err) {
            throw MalformedRow(path.string(), lineno, err.what());
        }
    }
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(std::string("config: ") + what);
    };
    require(sigma > 0, "sigma must be positive");
    require(prune_threshold >= 0, "prune_threshold must be nonnegative");
    require(lambda_alpha >= 0 && lambda_beta >= 0, "penalties must be nonnegative");
    require(max_iterations >= 1, "max_iterations must be at least 1");
    require(gradient_tolerance > 0, "gradient_tolerance must be positive");
    require(B >= 1, "B must be at least 1");
    require(fdr_level > 0 && fdr_level <= 1, "fdr_level must lie in (0, 1]");
    require(min_span_measures >= 0, "min_span_measures must be nonnegative");
    require(silence_min_qn > 0, "silence_min_qn must be positive");
    require(proximity_measures >= 0, "proximity_measures must be nonnegative");
    require(leap_threshold >= 1, "leap_threshold must be at least 1");
    require(w_pitch >= 0 && w_beat >= 0 && w_duration >= 0, "weights must be nonnegative");
    require(gap_penalty > 0, "gap_penalty must be positive");
    require(pitch_tol >= 0, "pitch_tol must be nonnegative");
    require(identity_rel_tol > 0 && rhythm_rel_tol > 0, "tolerances must be positive");
    require(sim_n_segments >= 0, "sim_n_segments must be nonnegative");
    require(sim_instances_min >= 1 && sim_instances_max >= sim_instances_min,
            "sim instance range must satisfy 1 <= min <= max");
    require(sim_q >= 1 && sim_p >= 1, "sim_q and sim_p must be at least 1");
    require(sim_burn_in >= 0 && sim_thinning >= 1, "sim chain settings out of range");
    require(sim_coeff_scale > 0, "sim_coeff_scale must be positive");
    require(metrical_weight_downbeat >= 0 && metrical_weight_onbeat >= 0 &&
                metrical_weight_offbeat >= 0,
            "metrical weights must be nonnegative");
}

std::string RunConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"B", std::to_string(B)},
        {"cadential_cue", cadential_cue ? "1" : "0"},
        {"clr_warm_start", clr_warm_start ? "1" : "0"},
        {"contour_strict", contour_strict ? "1" : "0"},
        {"fdr_level", csv::format_double(fdr_level)},
        {"gap_penalty", csv::format_double(gap_penalty)},
        {"gradient_tolerance", csv::format_double(gradient_tolerance)},
        {"identity_rel_tol", csv::format_double(identity_rel_tol)},
        {"lambda_alpha", csv::format_double(lambda_alpha)},
        {"lambda_beta", csv::format_double(lambda_beta)},
        {"leap_threshold", std::to_string(leap_threshold)},
        {"max_iterations", std::to_string(max_iterations)},
        {"metrical_weight_downbeat", csv::format_double(metrical_weight_downbeat)},
        {"metrical_weight_offbeat", csv::format_double(metrical_weight_offbeat)},
        {"metrical_weight_onbeat", csv::format_double(metrical_weight_onbeat)},
        {"min_span_measures", csv::format_double(min_span_measures)},
        {"per_instance_scores", per_instance_scores ? "1" : "0"},
        {"period", period},
        {"pitch_tol", csv::format_double(pitch_tol)},
        {"proximity_measures", csv::format_double(proximity_measures)},
        {"prune_threshold", csv::format_double(prune_threshold)},
        {"rhythm_rel_tol", csv::format_double(rhythm_rel_tol)},
        {"seed", std::to_string(seed)},
        {"sigma", csv::format_double(sigma)},
        {"silence_min_qn", csv::format_double(silence_min_qn)},
        {"sim_burn_in", std::to_string(sim_burn_in)},
        {"sim_coeff_scale", csv::format_double(sim_coeff_scale)},
        {"sim_instances_max", std::to_string(sim_instances_max)},
        {"sim_instances_min", std::to_string(sim_instances_min)},
        {"sim_n_segments", std::to_string(sim_n_segments)},
        {"sim_p", std::to_string(sim_p)},
        {"sim_q", std::to_string(sim_q)},
        {"sim_thinning", std::to_string(sim_thinning)},
        {"use_accentuation_sd", use_accentuation_sd ? "1" : "0"},
        {"use_t_reference", use_t_reference ? "1" : "0"},
        {"w_beat", csv::format_double(w_beat)},
        {"w_duration", csv::format_double(w_duration)},
        {"w_pitch", csv::format_double(w_pitch)},
    };
    std::string out;
    for (std::size_t i = 0; i < kv.size(); ++i) {
        if (i) out += ' ';
        out += kv[i].first + "=" + kv[i].second;
    }
    return out;
}

SegmentationConfig RunConfig::segmentation_config() const {
    return {silence_min_qn, min_span_measures, cadential_cue, proximity_measures};
}

AlignConfig RunConfig::align_config() const {
    return {w_pitch, w_beat, w_duration, gap_penalty, pitch_tol};
}

LabelConfig RunConfig::label_config() const {
    return {leap_threshold, contour_strict, identity_rel_tol, rhythm_rel_tol};
}

FeaturesConfig RunConfig::features_config() const {
    FeaturesConfig f;
    f.use_accentuation_sd = use_accentuation_sd;
    f.weight_downbeat = metrical_weight_downbeat;
    f.weight_onbeat = metrical_weight_onbeat;
    f.weight_offbeat = metrical_weight_offbeat;
    return f;
}

GraphConfig RunConfig::graph_config() const { return {sigma, prune_threshold}; }

FitConfig RunConfig::fit_config() const {
    FitConfig f;
    f.penalties = {lambda_alpha, lambda_beta};
    f.max_iterations = max_iterations;
    f.gradient_tolerance = gradient_tolerance;
    return f;
}

ClrConfig RunConfig::clr_config() const {
    ClrConfig c;
    c.B = B;
    c.seed = seed;
    c.fit = fit_config();
    return c;
}

SimConfig RunConfig::sim_config() const {
    SimConfig s;
    s.n_segments = sim_n_segments;
    s.instances_min = sim_instances_min;
    s.instances_max = sim_instances_max;
    s.q = sim_q;
    s.p = sim_p;
    s.burn_in = sim_burn_in;
    s.thinning = sim_thinning;
    s.seed = seed;
    s.graph = graph_config();
    const CrfParams truth = random_params(sim_p, sim_q, sim_coeff_scale, seed);
    s.true_alpha = truth.alpha;
    s.true_beta = truth.beta;
    return s;
}

// ---------------------------------------------------------------------------
// Stage plumbing

Stage stage_from_string(const std::string& name) {
    if (name == "ingest") return Stage::Ingest;
    if (name == "segment") return Stage::Segment;
    if (name == "label") return Stage::Label;
    if (name == "features") return Stage::Features;
    if (name == "graph") return Stage::Graph;
    if (name == "fit") return Stage::Fit;
    if (name == "infer") return Stage::Infer;
    if (name == "clrtest") return Stage::ClrTest;
    if (name == "simulate") return Stage::Simulate;
    if (name == "report") return Stage::Report;
    if (name == "all") return Stage::All;
    throw MissingArtifact("unknown stage '" + name + "'");
}

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::Ingest: return "ingest";
        case Stage::Segment: return "segment";
        case Stage::Label: return "label";
        case Stage::Features: return "features";
        case Stage::Graph: return "graph";
        case Stage::Fit: return "fit";
        case Stage::Infer: return "infer";
        case Stage::ClrTest: return "clrtest";
        case Stage::Simulate: return "simulate";
        case Stage::Report: return "report";
        case Stage::All: return "all";
    }
    return "?";
}

namespace {

struct Provenance {
    std::string config_echo;
    std::vector<std::pair<std::string, std::string>> inputs;   // (name, content hash)
};

Provenance make_provenance(const RunConfig& cfg, const std::vector<fs::path>& inputs) {
    Provenance p;
    p.config_echo = cfg.echo();
    for (const auto& path : inputs) p.inputs.push_back({path.filename().string(),
                                                        csv::file_hash(path)});
    return p;
}

void write_csv_meta(std::ofstream& out, const Provenance& prov) {
    out << "# config: " << prov.config_echo << '\n';
    for (const auto& [name, hash] : prov.inputs) out << "# input: " << name << ' ' << hash << '\n';
}

json provenance_json(const Provenance& prov) {
    json j;
    j["config"] = prov.config_echo;
    json inputs = json::object();
    for (const auto& [name, hash] : prov.inputs) inputs[name] = hash;
    j["inputs"] = inputs;
    return j;
}

void require_artifact(const fs::path& path) {
    if (!fs::exists(path)) throw MissingArtifact("missing artifact " + path.string());
}

fs::path notes_path(const fs::path& in) { return in / "notes.csv"; }
fs::path harmony_path(const fs::path& in) { return in / "harmony.csv"; }
fs::path motifs_path(const fs::path& in) { return in / "motifs.csv"; }

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

json read_json_file(const fs::path& path) {
    require_artifact(path);
    std::ifstream in(path);
    json j;
    in >> j;
    return j;
}

}  // namespace

Corpus load_corpus_dir(const fs::path& in_dir, const RunConfig& config) {
    require_artifact(notes_path(in_dir));
    require_artifact(harmony_path(in_dir));
    require_artifact(motifs_path(in_dir));
    Corpus corpus = load_corpus(notes_path(in_dir), harmony_path(in_dir), motifs_path(in_dir));

    if (!config.period.empty()) {
        const fs::path manifest = in_dir / "manifest.csv";
        if (!fs::exists(manifest))
            throw MissingArtifact("period filter requires " + manifest.string());
        const auto t = csv::read_file(manifest);
        const auto c_mv = csv::column(t, "movement_id");
        const auto c_pe = csv::column(t, "period");
        std::set<std::string> selected;
        for (const auto& r : t.rows)
            if (r.fields[c_pe] == config.period) selected.insert(r.fields[c_mv]);
        for (auto it = corpus.movements.begin(); it != corpus.movements.end();)
            it = selected.count(it->first) ? std::next(it) : corpus.movements.erase(it);
        corpus.period_tag = config.period;
        if (corpus.movements.empty())
            throw EmptyData("period '" + config.period + "' selects no movements");
    }
    return corpus;
}

// ---------------------------------------------------------------------------
// Artifact readers/writers

namespace {

std::vector<fs::path> corpus_inputs(const fs::path& in_dir) {
    return {notes_path(in_dir), harmony_path(in_dir), motifs_path(in_dir)};
}

void write_segments_csv(const fs::path& path, const SegmentationResult& result,
                        const Provenance& prov) {
    std::ofstream out(path);
    write_csv_meta(out, prov);
    for (const auto& d : result.diagnostics)
        out << "# diagnostic: " << d.movement_id << ' ' << d.entity << ": " << d.rule << '\n';
    out << "movement_id,segment_id,start_qn,end_qn,instance_ids\n";
    for (const auto& [mv_id, segs] : result.segments)
        for (const auto& s : segs) {
            out << mv_id << ',' << s.segment_id << ',' << csv::format_double(s.start_qn) << ','
                << csv::format_double(s.end_qn) << ',';
            for (std::size_t i = 0; i < s.member_instance_ids.size(); ++i) {
                if (i) out << ';';
                out << s.member_instance_ids[i];
            }
            out << '\n';
        }
}

std::map<std::string, std::vector<Segment>> read_segments_csv(const fs::path& path) {
    require_artifact(path);
    const auto t = csv::read_file(path);
    const auto c_mv = csv::column(t, "movement_id");
    const auto c_id = csv::column(t, "segment_id");
    const auto c_st = csv::column(t, "start_qn");
    const auto c_en = csv::column(t, "end_qn");
    const auto c_in = csv::column(t, "instance_ids");
    std::map<std::string, std::vector<Segment>> out;
    for (const auto& r : t.rows) {
        Segment s;
        s.movement_id = r.fields[c_mv];
        s.segment_id = static_cast<int>(csv::parse_long(t, r, c_id));
        s.start_qn = csv::parse_double(t, r, c_st);
        s.end_qn = csv::parse_double(t, r, c_en);
        if (!r.fields[c_in].empty()) s.member_instance_ids = csv::parse_id_list(t, r, c_in);
        out[s.movement_id].push_back(s);
    }
    for (auto& [mv, segs] : out)
        std::sort(segs.begin(), segs.end(),
                  [](const Segment& a, const Segment& b) { return a.segment_id < b.segment_id; });
    return out;
}

/// Applies artifact segment membership onto corpus instances.
void apply_segments(Corpus& corpus, const std::map<std::string, std::vector<Segment>>& segments) {
    for (auto& [mv_id, mv] : corpus.movements) {
        const auto it = segments.find(mv_id);
        if (it == segments.end())
            throw MissingArtifact("segments.csv lacks movement " + mv_id);
        std::map<long, int> seg_of;
        for (const auto& s : it->second)
            for (long iid : s.member_instance_ids) seg_of[iid] = s.segment_id;
        for (auto& inst : mv.instances) {
            const auto f = seg_of.find(inst.instance_id);
            if (f == seg_of.end())
                throw MissingArtifact("segments.csv lacks instance " +
                                      std::to_string(inst.instance_id) + " of movement " + mv_id);
            inst.segment_id = f->second;
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Stages

namespace {

void stage_ingest(const RunConfig& cfg, const fs::path& in_dir, const fs::path& out_dir) {
    const Corpus corpus = load_corpus_dir(in_dir, cfg);
    const auto diagnostics = validate_corpus(corpus);

    json j = provenance_json(make_provenance(cfg, corpus_inputs(in_dir)));
    j["movements"] = corpus.movements.size();
    j["instances"] = corpus.total_instances();
    json diags = json::array();
    for (const auto& d : diagnostics)
        diags.push_back({{"movement", d.movement_id}, {"entity", d.entity}, {"rule", d.rule}});
    j["diagnostics"] = diags;
    j["valid"] = diagnostics.empty();
    write_json_file(out_dir / "ingest.json", j);

    if (!diagnostics.empty())
        throw Error("corpus validation failed with " + std::to_string(diagnostics.size()) +
                    " diagnostics (see ingest.json)");
}

void stage_segment(const RunConfig& cfg, const fs::path& in_dir, const fs::path& out_dir) {
    Corpus corpus = load_corpus_dir(in_dir, cfg);
    const auto result = segment_corpus(corpus, cfg.segmentation_config());
    write_segments_csv(out_dir / "segments.csv", result,
                       make_provenance(cfg, corpus_inputs(in_dir)));
}

void stage_label(const RunConfig& cfg, const fs::path& in_dir, const fs::path& out_dir) {
    Corpus corpus = load_corpus_dir(in_dir, cfg);
    apply_segments(corpus, read_segments_csv(out_dir / "segments.csv"));
    const auto labeling = label_corpus(corpus, cfg.align_config(), cfg.label_config());

    auto inputs = corpus_inputs(in_dir);
    inputs.push_back(out_dir / "segments.csv");
    std::ofstream out(out_dir / "labels.csv");
    write_csv_meta(out, make_provenance(cfg, inputs));
    out << "movement_id,instance_id,segment_id,anchor_instance_id";
    for (const auto& name : label_column_names()) out << ',' << name;
    out << '\n';
    for (const auto& [mv_id, mv] : corpus.movements)
        for (const auto& inst : mv.instances) {
            const auto& row = labeling.rows.at(mv_id).at(inst.instance_id);
            out << mv_id << ',' << inst.instance_id << ',' << row.segment_id << ','
                << row.anchor_instance_id;
            for (int q = 0; q < kNumLabels; ++q) out << ',' << row.labels[q];
            out << '\n';
        }
}

void stage_features(const RunConfig& cfg, const fs::path& in_dir, const fs::path& out_dir) {
    Corpus corpus = load_corpus_dir(in_dir, cfg);
    apply_segments(corpus, read_segments_csv(out_dir / "segments.csv"));

    const auto names = feature_names(cfg.use_accentuation_sd);
    std::vector<std::vector<double>> rows;
    auto inputs = corpus_inputs(in_dir);
    inputs.push_back(out_dir / "segments.csv");
    std::ofstream out(out_dir / "features.csv");
    write_csv_meta(out, make_provenance(cfg, inputs));
    out << "movement_id,instance_id,segment_id";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (const auto& [mv_id, mv] : corpus.movements)
        for (const auto& inst : mv.instances) {
            const auto f = compute_instance_features(inst, mv, cfg.features_config());
            const auto values = f.values(cfg.use_accentuation_sd);
            out << mv_id << ',' << inst.instance_id << ',' << inst.segment_id;
            for (double v : values) out << ',' << csv::format_double(v);
            out << '\n';
            rows.push_back(values);
        }

    Eigen::MatrixXd raw(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < names.size(); ++j)
            raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    const DesignMatrix design = build_design_matrix(raw, names);

    json meta = provenance_json(make_provenance(cfg, inputs));
    meta["feature_order"] = names;
    meta["columns"] = design.column_names;
    meta["means"] = design.means;
    meta["sds"] = design.sds;
    meta["dropped"] = design.dropped_columns;
    meta["bias"] = true;
    meta["standardization"] = "zscore";   // (x - mean) / population sd per kept column
    write_json_file(out_dir / "design_meta.json", meta);
}

/// Per-segment instance counts in canonical order, one entry per
/// non-empty segment. Empty segments hold no motif instances and thus
/// never enter the model.
std::vector<std::pair<Segment, std::string>> model_segments(
    const std::map<std::string, std::vector<Segment>>& segments) {
    std::vector<std::pair<Segment, std::string>> out;
    for (const auto& [mv_id, segs] : segments)
        for (const auto& s : segs)
            if (!s.member_instance_ids.empty()) out.push_back({s, mv_id});
    return out;
}

void stage_graph(const RunConfig& cfg, const fs::path& in_dir, const fs::path& out_dir) {
    const auto segments = read_segments_csv(out_dir / "segments.csv");
    const auto blocks = model_segments(segments);

    std::vector<int> sizes;
    for (const auto& [s, mv] : blocks)
        sizes.push_back(static_cast<int>(s.member_instance_ids.size()));
    const BlockDiagonal A = build_adjacency(sizes, cfg.graph_config());

    json j = provenance_json(make_provenance(cfg, {out_dir / "segments.csv"}));
    json segs = json::array();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& [seg, mv_id] = blocks[b];
        json js;
        js["movement_id"] = mv_id;
        js["segment_id"] = seg.segment_id;
        js["global_segment"] = b;
        js["instances"] = seg.member_instance_ids;
        json edges = json::array();
        const Eigen::MatrixXd& W = A.blocks[b].W;
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index jj = i + 1; jj < W.cols(); ++jj)
                if (W(i, jj) != 0.0) edges.push_back({i, jj, W(i, jj)});
        js["edges"] = edges;
        segs.push_back(js);
    }
    j["segments"] = segs;
    write_json_file(out_dir / "graph.json", j);
}

struct GraphArtifact {
    BlockDiagonal adjacency;
    std::vector<std::string> row_movement;
    std::vector<long> row_instance;
};

GraphArtifact read_graph_json(const fs::path& path) {
    const json j = read_json_file(path);
    GraphArtifact out;
    int offset = 0;
    for (const auto& js : j.at("segments")) {
        const auto instances = js.at("instances").get<std::vector<long>>();
        const int n = static_cast<int>(instances.size());
        BlockDiagonal::Block b;
        b.offset = offset;
        b.W = Eigen::MatrixXd::Zero(n, n);
        for (const auto& e : js.at("edges")) {
            const int r = e.at(0).get<int>();
            const int c = e.at(1).get<int>();
            const double w = e.at(2).get<double>();
            b.W(r, c) = w;
            b.W(c, r) = w;
        }
        for (long iid : instances) {
            out.row_movement.push_back(js.at("movement_id").get<std::string>());
            out.row_instance.push_back(iid);
        }
        offset += n;
        out.adjacency.blocks.push_back(std::move(b));
    }
    out.adjacency.n = offset;
    return out;
}

struct TableArtifact {
    std::vector<std::string> row_movement;
    std::vector<long> row_instance;
    std::vector<int> row_segment;
    std::vector<std::string> value_names;
    Eigen::MatrixXd values;
};

/// Shared reader for features.csv / labels.csv style tables: fixed
/// leading key columns, then numeric columns.
TableArtifact read_instance_table(const fs::path& path, int leading) {
    require_artifact(path);
    const auto t = csv::read_file(path);
    TableArtifact out;
    for (std::size_t c = static_cast<std::size_t>(leading); c < t.header.size(); ++c)
        out.value_names.push_back(t.header[c]);
    out.values.resize(static_cast<Eigen::Index>(t.rows.size()),
                      static_cast<Eigen::Index>(out.value_names.size()));
    const auto c_mv = csv::column(t, "movement_id");
    const auto c_in = csv::column(t, "instance_id");
    const auto c_se = csv::column(t, "segment_id");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        out.row_movement.push_back(r.fields[c_mv]);
        out.row_instance.push_back(csv::parse_long(t, r, c_in));
        out.row_segment.push_back(static_cast<int>(csv::parse_long(t, r, c_se)));
        for (std::size_t c = 0; c < out.value_names.size(); ++c)
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                csv::parse_double(t, r, static_cast<std::size_t>(leading) + c);
    }
    return out;
}

}  // namespace

std::string display_label_name(const std::string& column) {
    const auto& columns = label_column_names();
    for (int q = 0; q < kNumLabels; ++q)
        if (column == columns[static_cast<std::size_t>(q)])
            return label_names()[static_cast<std::size_t>(q)];
    return column;
}

ModelData load_model_data(const fs::path& out_dir) {
    const auto features = read_instance_table(out_dir / "features.csv", 3);
    const auto labels = read_instance_table(out_dir / "labels.csv", 4);
    const auto graph = read_graph_json(out_dir / "graph.json");
    const json meta = read_json_file(out_dir / "design_meta.json");

    if (features.row_movement != labels.row_movement ||
        features.row_instance != labels.row_instance)
        throw DimensionMismatch("features.csv and labels.csv disagree on instance rows");
    if (features.row_movement != graph.row_movement ||
        features.row_instance != graph.row_instance)
        throw DimensionMismatch("graph.json instance order disagrees with features.csv");

    ModelData md;
    md.row_movement = features.row_movement;
    md.row_instance = features.row_instance;
    md.Y = labels.values;
    for (const auto& column : labels.value_names)
        md.label_names_.push_back(display_label_name(column));
    md.adjacency = graph.adjacency;
    md.segment_of = md.adjacency.segment_of();
    md.n_segments = static_cast<int>(md.adjacency.blocks.size());

    const auto feature_order = meta.at("feature_order").get<std::vector<std::string>>();
    const auto kept = meta.at("columns").get<std::vector<std::string>>();
    const auto means = meta.at("means").get<std::vector<double>>();
    const auto sds = meta.at("sds").get<std::vector<double>>();
    if (feature_order != features.value_names)
        throw DimensionMismatch("design_meta.json feature order disagrees with features.csv");

    md.feature_names = kept;
    md.X.resize(features.values.rows(), 1 + static_cast<Eigen::Index>(kept.size()));
    md.X.col(0).setOnes();
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const auto it = std::find(feature_order.begin(), feature_order.end(), kept[k]);
        const Eigen::Index src = static_cast<Eigen::Index>(it - feature_order.begin());
        md.X.col(1 + static_cast<Eigen::Index>(k)) =
            (features.values.col(src).array() - means[k]) / sds[k];
    }
    return md;
}

namespace {

std::vector<fs::path> model_inputs(const fs::path& out_dir) {
    return {out_dir / "features.csv", out_dir / "design_meta.json", out_dir / "labels.csv",
            out_dir / "graph.json"};
}

std::vector<std::string> alpha_row_names(const ModelData& md) {
    std::vector<std::string> names = {"intercept"};
    names.insert(names.end(), md.feature_names.begin(), md.feature_names.end());
    return names;
}

void stage_fit(const RunConfig& cfg, const fs::path&, const fs::path& out_dir) {
    for (const auto& p : model_inputs(out_dir)) require_artifact(p);
    const ModelData md = load_model_data(out_dir);
    const FitResult fit = fit_crf(md.X, md.Y, md.adjacency, ModelSpec::full(), cfg.fit_config());

    json j = provenance_json(make_provenance(cfg, model_inputs(out_dir)));
    json alpha;
    alpha["rows"] = alpha_row_names(md);
    alpha["labels"] = md.label_names_;
    json avals = json::array();
    for (Eigen::Index r = 0; r < fit.params.alpha.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < fit.params.alpha.cols(); ++c)
            row.push_back(fit.params.alpha(r, c));
        avals.push_back(row);
    }
    alpha["values"] = avals;
    j["alpha"] = alpha;

    json beta;
    beta["labels"] = md.label_names_;
    json bvals = json::array();
    for (Eigen::Index r = 0; r < fit.params.beta.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < fit.params.beta.cols(); ++c)
            row.push_back(fit.params.beta(r, c));
        bvals.push_back(row);
    }
    beta["values"] = bvals;
    j["beta"] = beta;

    j["objective"] = fit.objective;
    j["unpenalized"] = fit.unpenalized;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["gradient_norm"] = fit.gradient_norm;
    j["objective_trace"] = fit.trace;
    write_json_file(out_dir / "params.json", j);
}

CrfParams read_params_json(const fs::path& path) {
    const json j = read_json_file(path);
    const auto avals = j.at("alpha").at("values");
    const auto bvals = j.at("beta").at("values");
    CrfParams params;
    params.alpha.resize(static_cast<Eigen::Index>(avals.size()),
                        static_cast<Eigen::Index>(avals.at(0).size()));
    for (Eigen::Index r = 0; r < params.alpha.rows(); ++r)
        for (Eigen::Index c = 0; c < params.alpha.cols(); ++c)
            params.alpha(r, c) = avals.at(r).at(c).get<double>();
    params.beta.resize(static_cast<Eigen::Index>(bvals.size()),
                       static_cast<Eigen::Index>(bvals.at(0).size()));
    for (Eigen::Index r = 0; r < params.beta.rows(); ++r)
        for (Eigen::Index c = 0; c < params.beta.cols(); ++c)
            params.beta(r, c) = bvals.at(r).at(c).get<double>();
    return params;
}

void stage_infer(const RunConfig& cfg, const fs::path&, const fs::path& out_dir) {
    for (const auto& p : model_inputs(out_dir)) require_artifact(p);
    require_artifact(out_dir / "params.json");
    const ModelData md = load_model_data(out_dir);
    const CrfParams params = read_params_json(out_dir / "params.json");
    const int Q = static_cast<int>(md.Y.cols());
    const int pa = static_cast<int>(md.X.cols());

    SandwichOptions opts;
    opts.per_instance_scores = cfg.per_instance_scores;
    double jitter_used = 0.0;
    SandwichCovariance cov;
    try {
        cov = godambe_covariance(md.X, md.Y, md.adjacency, params, ModelSpec::full(),
                                 md.segment_of, md.n_segments, opts);
    } catch (const SingularHessian&) {
        opts.jitter = 1e-8;
        jitter_used = opts.jitter;
        cov = godambe_covariance(md.X, md.Y, md.adjacency, params, ModelSpec::full(),
                                 md.segment_of, md.n_segments, opts);
    }

    const bool use_t = cfg.use_t_reference;
    const int df = std::max(1, md.n_segments - 1);

    // alpha family: one row per (transformation, feature); the estimate
    // order matches the leading block of the free-parameter covariance
    std::vector<double> a_est;
    std::vector<std::pair<int, int>> a_keys;   // (label, row)
    for (int q = 0; q < Q; ++q)
        for (int r = 0; r < pa; ++r) {
            a_keys.push_back({q, r});
            a_est.push_back(params.alpha(r, q));
        }
    const int n_alpha_params = pa * Q;
    const auto a_rows =
        wald_intervals(a_est, Eigen::MatrixXd(cov.G.topLeftCorner(n_alpha_params,
                                                                  n_alpha_params)),
                       0.95, use_t, df);

    // beta family: entries (q <= r) via the delta method over basis coords
    const BetaBasis basis(Q);
    const int n_alpha = pa * Q;
    const Eigen::MatrixXd Gcc = cov.G.block(n_alpha, n_alpha, basis.dim(), basis.dim());
    std::vector<double> b_est, b_se;
    std::vector<std::pair<int, int>> b_keys;
    for (int q = 0; q < Q; ++q)
        for (int r = q; r < Q; ++r) {
            b_keys.push_back({q, r});
            b_est.push_back(params.beta(q, r));
            Eigen::VectorXd load(basis.dim());
            for (int k = 0; k < basis.dim(); ++k) load(k) = basis.element(k)(q, r);
            b_se.push_back(std::sqrt(std::max(0.0, double(load.transpose() * Gcc * load))));
        }
    const auto b_rows = wald_intervals(b_est, b_se, 0.95, use_t, df);

    const EssReport ess = effective_sample_size(md.Y, md.segment_of, md.n_segments);
    const auto row_names = alpha_row_names(md);
    const auto prov = make_provenance(cfg, [&] {
        auto v = model_inputs(out_dir);
        v.push_back(out_dir / "params.json");
        return v;
    }());

    auto flag_of = [](int e) {
        return std::string(e < 30 ? "lt30" : (e < 50 ? "lt50" : ""));
    };

    {
        std::ofstream out(out_dir / "unary_effects.csv");
        write_csv_meta(out, prov);
        out << "transformation,feature,estimate,se,ci_lo,ci_hi,p_value,q_bh,ess\n";
        for (std::size_t k = 0; k < a_rows.size(); ++k) {
            const auto& [q, r] = a_keys[k];
            const auto& w = a_rows[k];
            out << md.label_names_[static_cast<std::size_t>(q)] << ','
                << row_names[static_cast<std::size_t>(r)] << ',' << csv::format_double(w.estimate)
                << ',' << csv::format_double(w.se) << ',' << csv::format_double(w.ci_lo) << ','
                << csv::format_double(w.ci_hi) << ',' << csv::format_double(w.p_value) << ','
                << csv::format_double(w.q_bh) << ',' << ess.unary_ess << '\n';
        }
    }
    {
        std::ofstream out(out_dir / "pairwise_effects.csv");
        write_csv_meta(out, prov);
        out << "label_q,label_r,estimate,se,ci_lo,ci_hi,p_value,q_bh,ess\n";
        for (std::size_t k = 0; k < b_rows.size(); ++k) {
            const auto& [q, r] = b_keys[k];
            const auto& w = b_rows[k];
            out << md.label_names_[static_cast<std::size_t>(q)] << ','
                << md.label_names_[static_cast<std::size_t>(r)] << ','
                << csv::format_double(w.estimate) << ',' << csv::format_double(w.se) << ','
                << csv::format_double(w.ci_lo) << ',' << csv::format_double(w.ci_hi) << ','
                << csv::format_double(w.p_value) << ',' << csv::format_double(w.q_bh) << ','
                << ess.pairwise(q, r) << '\n';
        }
    }
    {
        std::ofstream out(out_dir / "ess.csv");
        write_csv_meta(out, prov);
        out << "kind,label_q,label_r,ess,flag\n";
        out << "unary,,," << ess.unary_ess << ',' << flag_of(ess.unary_ess) << '\n';
        for (int q = 0; q < Q; ++q)
            for (int r = q; r < Q; ++r)
                out << "pairwise," << md.label_names_[static_cast<std::size_t>(q)] << ','
                    << md.label_names_[static_cast<std::size_t>(r)] << ',' << ess.pairwise(q, r)
                    << ',' << flag_of(ess.pairwise(q, r)) << '\n';
    }

    json j = provenance_json(prov);
    j["reference"] = use_t ? "t" : "normal";
    j["df"] = use_t ? df : 0;
    j["jitter"] = jitter_used;
    j["score_clustering"] = cfg.per_instance_scores ? "instance" : "segment";
    json unary = json::array();
    for (std::size_t k = 0; k < a_rows.size(); ++k) {
        const auto& [q, r] = a_keys[k];
        const auto& w = a_rows[k];
        unary.push_back({{"transformation", md.label_names_[static_cast<std::size_t>(q)]},
                         {"feature", row_names[static_cast<std::size_t>(r)]},
                         {"estimate", w.estimate},
                         {"se", w.se},
                         {"ci_lo", w.ci_lo},
                         {"ci_hi", w.ci_hi},
                         {"p_value", w.p_value},
                         {"q_bh", w.q_bh}});
    }
    j["unary"] = unary;
    json pairwise = json::array();
    for (std::size_t k = 0; k < b_rows.size(); ++k) {
        const auto& [q, r] = b_keys[k];
        const auto& w = b_rows[k];
        pairwise.push_back({{"label_q", md.label_names_[static_cast<std::size_t>(q)]},
                            {"label_r", md.label_names_[static_cast<std::size_t>(r)]},
                            {"estimate", w.estimate},
                            {"se", w.se},
                            {"ci_lo", w.ci_lo},
                            {"ci_hi", w.ci_hi},
                            {"p_value", w.p_value},
                            {"q_bh", w.q_bh},
                            {"ess", ess.pairwise(q, r)}});
    }
    j["pairwise"] = pairwise;
    j["unary_ess"] = ess.unary_ess;
    write_json_file(out_dir / "inference.json", j);
}

void stage_clrtest(const RunConfig& cfg, const fs::path&, const fs::path& out_dir) {
    for (const auto& p : model_inputs(out_dir)) require_artifact(p);
    const ModelData md = load_model_data(out_dir);

    ClrConfig clr_cfg = cfg.clr_config();
    clr_cfg.warm_start = cfg.clr_warm_start;

    std::ofstream out(out_dir / "clr_tests.csv");
    write_csv_meta(out, make_provenance(cfg, model_inputs(out_dir)));
    out << "# rng_scheme: " << Rng::kSchemeId << '\n';
    out << "comparison,observed_clr,B,p_perm,n_retried,n_failed\n";
    for (const auto comparison :
         {ClrComparison::BaselineVsUnary, ClrComparison::UnaryVsFull,
          ClrComparison::PairwiseVsFull}) {
        const auto res = clr_permutation_test(md.X, md.Y, md.adjacency, comparison, clr_cfg);
        out << to_string(comparison) << ',' << csv::format_double(res.observed_clr) << ','
            << clr_cfg.B << ',' << csv::format_double(res.p_perm) << ',' << res.n_retried << ','
            << res.n_failed << '\n';
    }
}

void stage_simulate(const RunConfig& cfg, const fs::path&, const fs::path& out_dir) {
    const SimConfig sim = cfg.sim_config();
    const SyntheticData data = synthesize_corpus(sim);
    const Provenance prov = make_provenance(cfg, {});
    const std::string movement = "sim";

    // synthetic label columns: the standard eight when q matches, else y_1..y_q
    std::vector<std::string> ycols;
    if (sim.q == kNumLabels)
        ycols.assign(label_column_names().begin(), label_column_names().end());
    else
        for (int q = 1; q <= sim.q; ++q) ycols.push_back("y_" + std::to_string(q));

    {
        std::ofstream out(out_dir / "segments.csv");
        write_csv_meta(out, prov);
        out << "movement_id,segment_id,start_qn,end_qn,instance_ids\n";
        int row = 0;
        for (int s = 0; s < data.n_segments; ++s) {
            const int n = static_cast<int>(data.adjacency.blocks[static_cast<std::size_t>(s)]
                                               .W.rows());
            out << movement << ',' << s << ',' << csv::format_double(s) << ','
                << csv::format_double(s + 1) << ',';
            for (int k = 0; k < n; ++k) {
                if (k) out << ';';
                out << row + k;
            }
            out << '\n';
            row += n;
        }
    }
    {
        std::ofstream out(out_dir / "labels.csv");
        write_csv_meta(out, prov);
        out << "movement_id,instance_id,segment_id,anchor_instance_id";
        for (const auto& c : ycols) out << ',' << c;
        out << '\n';
        for (Eigen::Index i = 0; i < data.Y.rows(); ++i) {
            out << movement << ',' << i << ',' << data.segment_of[static_cast<std::size_t>(i)]
                << ",-1";
            for (Eigen::Index q = 0; q < data.Y.cols(); ++q)
                out << ',' << static_cast<int>(data.Y(i, q));
            out << '\n';
        }
    }
    const auto fnames = [&] {
        std::vector<std::string> n;
        for (int k = 1; k <= sim.p; ++k) n.push_back("f" + std::to_string(k));
        return n;
    }();
    {
        std::ofstream out(out_dir / "features.csv");
        write_csv_meta(out, prov);
        out << "movement_id,instance_id,segment_id";
        for (const auto& n : fnames) out << ',' << n;
        out << '\n';
        for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
            out << movement << ',' << i << ',' << data.segment_of[static_cast<std::size_t>(i)];
            for (Eigen::Index c = 1; c < data.X.cols(); ++c)
                out << ',' << csv::format_double(data.X(i, c));
            out << '\n';
        }
    }
    {
        const DesignMatrix design = build_design_matrix(data.X.rightCols(sim.p), fnames);
        json meta = provenance_json(prov);
        meta["feature_order"] = fnames;
        meta["columns"] = design.column_names;
        meta["means"] = design.means;
        meta["sds"] = design.sds;
        meta["dropped"] = design.dropped_columns;
        meta["bias"] = true;
        meta["standardization"] = "zscore";
        write_json_file(out_dir / "design_meta.json", meta);
    }
    {
        json j = provenance_json(prov);
        json segs = json::array();
        int row = 0;
        for (int s = 0; s < data.n_segments; ++s) {
            const Eigen::MatrixXd& W = data.adjacency.blocks[static_cast<std::size_t>(s)].W;
            json js;
            js["movement_id"] = movement;
            js["segment_id"] = s;
            js["global_segment"] = s;
            std::vector<long> ids;
            for (Eigen::Index k = 0; k < W.rows(); ++k) ids.push_back(row + k);
            js["instances"] = ids;
            json edges = json::array();
            for (Eigen::Index i = 0; i < W.rows(); ++i)
                for (Eigen::Index jj = i + 1; jj < W.cols(); ++jj)
                    if (W(i, jj) != 0.0) edges.push_back({i, jj, W(i, jj)});
            js["edges"] = edges;
            segs.push_back(js);
            row += static_cast<int>(W.rows());
        }
        j["segments"] = segs;
        write_json_file(out_dir / "graph.json", j);
    }
    {
        json j = provenance_json(prov);
        j["rng_scheme"] = Rng::kSchemeId;
        json alpha = json::array();
        for (Eigen::Index r = 0; r < sim.true_alpha.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < sim.true_alpha.cols(); ++c)
                row.push_back(sim.true_alpha(r, c));
            alpha.push_back(row);
        }
        j["true_alpha"] = alpha;
        json beta = json::array();
        for (Eigen::Index r = 0; r < sim.true_beta.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < sim.true_beta.cols(); ++c)
                row.push_back(sim.true_beta(r, c));
            beta.push_back(row);
        }
        j["true_beta"] = beta;
        write_json_file(out_dir / "sim_truth.json", j);
    }
}

void stage_report(const RunConfig& cfg, const fs::path&, const fs::path& out_dir) {
    require_artifact(out_dir / "labels.csv");
    require_artifact(out_dir / "unary_effects.csv");
    require_artifact(out_dir / "pairwise_effects.csv");
    require_artifact(out_dir / "clr_tests.csv");
    const fs::path report_dir = out_dir / "report";
    fs::create_directories(report_dir);

    char buf[64];
    auto fmt = [&buf](const char* spec, double v) {
        std::snprintf(buf, sizeof(buf), spec, v);
        return std::string(buf);
    };

    {
        const auto labels = read_instance_table(out_dir / "labels.csv", 4);
        const Eigen::Index n = labels.values.rows();
        if (n == 0) throw EmptyData("labels.csv has no instances");
        const Provenance prov = make_provenance(cfg, {out_dir / "labels.csv"});
        std::ofstream out(report_dir / "prevalence.csv");
        write_csv_meta(out, prov);
        out << "transformation,count,n,frequency\n";
        for (std::size_t q = 0; q < labels.value_names.size(); ++q) {
            const double count = labels.values.col(static_cast<Eigen::Index>(q)).sum();
            out << display_label_name(labels.value_names[q]) << ',' << static_cast<long>(count)
                << ',' << n << ',' << fmt("%.3f", count / static_cast<double>(n)) << '\n';
        }
    }
    {
        const auto t = csv::read_file(out_dir / "clr_tests.csv");
        const Provenance prov = make_provenance(cfg, {out_dir / "clr_tests.csv"});
        std::ofstream out(report_dir / "clr.csv");
        write_csv_meta(out, prov);
        out << "comparison,clr,p_perm\n";
        const auto c_cmp = csv::column(t, "comparison");
        const auto c_clr = csv::column(t, "observed_clr");
        const auto c_p = csv::column(t, "p_perm");
        for (const auto& r : t.rows)
            out << r.fields[c_cmp] << ',' << fmt("%.1f", csv::parse_double(t, r, c_clr)) << ','
                << fmt("%.4f", csv::parse_double(t, r, c_p)) << '\n';
    }
    // effect tables filtered at q_BH < fdr_level
    auto filter_effects = [&](const fs::path& src, const fs::path& dst,
                              const std::vector<std::string>& keys) {
        const auto t = csv::read_file(src);
        const Provenance prov = make_provenance(cfg, {src});
        std::ofstream out(dst);
        write_csv_meta(out, prov);
        for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
        out << ",estimate,se,ci_lo,ci_hi,q_bh\n";
        const auto c_est = csv::column(t, "estimate");
        const auto c_se = csv::column(t, "se");
        const auto c_lo = csv::column(t, "ci_lo");
        const auto c_hi = csv::column(t, "ci_hi");
        const auto c_q = csv::column(t, "q_bh");
        for (const auto& r : t.rows) {
            const double q = csv::parse_double(t, r, c_q);
            if (!(q < cfg.fdr_level)) continue;
            for (std::size_t i = 0; i < keys.size(); ++i)
                out << (i ? "," : "") << r.fields[csv::column(t, keys[i])];
            out << ',' << fmt("%.3f", csv::parse_double(t, r, c_est)) << ','
                << fmt("%.3f", csv::parse_double(t, r, c_se)) << ','
                << fmt("%.3f", csv::parse_double(t, r, c_lo)) << ','
                << fmt("%.3f", csv::parse_double(t, r, c_hi)) << ','
                << fmt("%.3f", q) << '\n';
        }
    };
    filter_effects(out_dir / "unary_effects.csv", report_dir / "unary_effects.csv",
                   {"transformation", "feature"});
    filter_effects(out_dir / "pairwise_effects.csv", report_dir / "pairwise_effects.csv",
                   {"label_q", "label_r"});
}

}  // namespace

void run_stage(Stage stage, const RunConfig& config, const fs::path& in_dir,
               const fs::path& out_dir) {
    config.validate();
    fs::create_directories(out_dir);
    switch (stage) {
        case Stage::Ingest: stage_ingest(config, in_dir, out_dir); return;
        case Stage::Segment: stage_segment(config, in_dir, out_dir); return;
        case Stage::Label: stage_label(config, in_dir, out_dir); return;
        case Stage::Features: stage_features(config, in_dir, out_dir); return;
        case Stage::Graph: stage_graph(config, in_dir, out_dir); return;
        case Stage::Fit: stage_fit(config, in_dir, out_dir); return;
        case Stage::Infer: stage_infer(config, in_dir, out_dir); return;
        case Stage::ClrTest: stage_clrtest(config, in_dir, out_dir); return;
        case Stage::Simulate: stage_simulate(config, in_dir, out_dir); return;
        case Stage::Report: stage_report(config, in_dir, out_dir); return;
        case Stage::All:
            for (const Stage s : {Stage::Ingest, Stage::Segment, Stage::Label, Stage::Features,
                                  Stage::Graph, Stage::Fit, Stage::Infer, Stage::ClrTest,
                                  Stage::Report})
                run_stage(s, config, in_dir, out_dir);
            return;
    }
    throw Error("unknown stage");
}

}  // namespace motifcrf
