#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace motifcrf {

/// Onsets are quarter-note floats; two onsets closer than this are the
/// same score time.
constexpr double kOnsetTol = 1e-6;

enum class FunctionZone { Tonic, PreDominant, Dominant };

std::string to_string(FunctionZone z);
FunctionZone function_zone_from_string(const std::string& s);

struct NoteEvent {
    long note_id = 0;
    double onset_qn = 0.0;
    double duration_qn = 0.0;
    int midi_pitch = 0;
    int measure = 1;
    double beat = 1.0;
    double dynamic_level = 0.0;   // ordinal mapping of dynamic marks (pp=1 .. ff=8 suggested)
    int expressive_marks = 0;

    double offset_qn() const { return onset_qn + duration_qn; }
};

struct HarmonyEvent {
    double onset_qn = 0.0;
    std::string local_key;        // tonic pitch class + mode, e.g. "C" major, "c" minor
    FunctionZone function_zone = FunctionZone::Tonic;
    bool is_secondary = false;
    double complexity = 0.0;
};

struct MotifInstance {
    long motif_class_id = 0;
    long instance_id = 0;
    std::vector<long> note_ids;   // ordered by onset
    int segment_id = -1;          // assigned by segmentation
    bool is_anchor = false;       // assigned by anchor selection
};

struct Movement {
    std::string movement_id;
    std::vector<NoteEvent> notes;        // sorted by (onset, note_id)
    std::vector<HarmonyEvent> harmony;   // sorted by onset
    std::vector<MotifInstance> instances;

    const NoteEvent* find_note(long note_id) const;
    double span_start_qn() const;
    double span_end_qn() const;
};

/// Tonic pitch class (0-11) of a local-key string such as "C", "c",
/// "F#", "bb". Case carries mode only; accidentals are '#'/'b'.
int tonic_pitch_class(const std::string& local_key);

/// Function zone active at a score time, i.e. the latest harmony event
/// with onset <= t (within onset tolerance). Throws HarmonyGap when t
/// precedes the first event.
FunctionZone zone_at(const std::vector<HarmonyEvent>& harmony, double t);

/// The harmony event active at a score time (same lookup as zone_at).
const HarmonyEvent& harmony_at(const std::vector<HarmonyEvent>& harmony, double t);

struct Corpus {
    // keyed by movement_id; map keeps canonical (sorted) movement order
    std::map<std::string, Movement> movements;
    std::optional<std::string> period_tag;

    std::size_t total_instances() const;
};

struct Diagnostic {
    std::string movement_id;
    std::string entity;   // "note 5", "harmony", "instance 3", ...
    std::string rule;     // violated rule, e.g. "non-positive duration"
};

/// Loads and cross-validates the three annotation tables.
///
/// Rows are sorted by onset within movement regardless of input order.
/// Throws MalformedRow / DuplicateNoteId / DanglingReference.
Corpus load_corpus(const std::filesystem::path& notes_path,
                   const std::filesystem::path& harmony_path,
                   const std::filesystem::path& motifs_path);

/// Invariant sweep; returns one diagnostic per violation, empty when the
/// corpus is well-formed. Never throws.
std::vector<Diagnostic> validate_corpus(const Corpus& corpus);

/// Writes notes/harmony/motifs CSVs such that load_corpus(save(c)) == c.
void save_corpus(const Corpus& corpus, const std::filesystem::path& notes_path,
                 const std::filesystem::path& harmony_path,
                 const std::filesystem::path& motifs_path);

}  // namespace motifcrf
