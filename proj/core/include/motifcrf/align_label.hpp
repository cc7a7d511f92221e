#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "motifcrf/score_model.hpp"

namespace motifcrf {

/// Index into LabelVector::y. Fixed order, also the report/CSV order.
enum Label : int {
    kIdentity = 0,
    kContour,
    kSalientLeap,
    kRhythm,
    kNoteEdit,
    kHarmony,
    kIntervallic,
    kSymmetry,
};

constexpr int kNumLabels = 8;

/// Multilabel transformation vector of one instance vs its anchor.
struct LabelVector {
    std::array<int, kNumLabels> y{};

    int& operator[](int q) { return y[q]; }
    int operator[](int q) const { return y[q]; }
    bool operator==(const LabelVector&) const = default;
};

const std::array<std::string, kNumLabels>& label_names();
const std::array<std::string, kNumLabels>& label_column_names();

constexpr int kGap = -1;

/// Global monotone alignment between anchor and instance note sequences.
/// Every index of both sequences appears exactly once; a kGap component
/// marks an insertion/deletion. Gap-gap pairs are excluded: opposite-side
/// gaps may not be adjacent (two single notes always form a match pair).
struct Alignment {
    std::vector<std::pair<int, int>> pairs;   // (anchor index | kGap, instance index | kGap)
    double cost = 0.0;
};

struct AlignConfig {
    double w_pitch = 1.0;
    double w_beat = 0.5;
    double w_duration = 0.5;
    double gap_penalty = 4.0;   // per gapped note; octave mismatch (12) > gap pair (8)
    double pitch_tol = 0.0;     // positionwise tolerance of the simple-matching shortcut
};

struct LabelConfig {
    int leap_threshold = 5;          // semitones; a perfect fourth or larger
    bool contour_strict = true;      // require at least one differing interval size
    double identity_rel_tol = 1e-6;  // duration-proportionality tolerance
    double rhythm_rel_tol = 1e-3;    // IOI-proportionality tolerance
};

/// Needleman-Wunsch over (pitch, beat, duration) distances. Always runs
/// the dynamic program; exposed for oracle comparisons.
Alignment align_dp(const std::vector<NoteEvent>& anchor_notes,
                   const std::vector<NoteEvent>& instance_notes, const AlignConfig& config);

/// Simple positionwise matching when lengths agree and pitches coincide,
/// otherwise the dynamic program. Throws EmptySequence.
Alignment align_instances(const std::vector<NoteEvent>& anchor_notes,
                          const std::vector<NoteEvent>& instance_notes,
                          const AlignConfig& config);

/// Evaluates the eight transformation families on the matched pairs of
/// an alignment. Throws HarmonyGap when a matched onset precedes the
/// first harmony event.
LabelVector evaluate_labels(const std::vector<NoteEvent>& anchor_notes,
                            const std::vector<NoteEvent>& instance_notes,
                            const Alignment& alignment,
                            const std::vector<HarmonyEvent>& harmony_track,
                            const LabelConfig& config);

/// The label vector of an instance that is its own reference.
LabelVector self_anchor_labels();

/// Resolves an instance's note_ids against its movement.
std::vector<NoteEvent> notes_of(const Movement& movement, const MotifInstance& instance);

/// Per-instance labeling output.
struct LabeledInstance {
    int segment_id = -1;
    long anchor_instance_id = -1;
    LabelVector labels;
};

struct LabelingResult {
    // movement_id -> instance_id -> row
    std::map<std::string, std::map<long, LabeledInstance>> rows;
};

/// Flags anchors (earliest instance per segment x class), resolves each
/// instance's reference (segment anchor, else the most recent anchor of
/// the class from a preceding segment, else itself). Mutates is_anchor.
void select_anchors(Corpus& corpus,
                    std::map<std::string, std::map<long, long>>& anchor_of);

/// select_anchors + align + evaluate over the whole corpus.
/// Requires segmentation to have run.
LabelingResult label_corpus(Corpus& corpus, const AlignConfig& align_config,
                            const LabelConfig& label_config);

}  // namespace motifcrf
