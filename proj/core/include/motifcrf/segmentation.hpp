#pragma once

#include <map>
#include <string>
#include <vector>

#include "motifcrf/score_model.hpp"

namespace motifcrf {

enum class BoundaryCue { Silence, RepeatedPitch, Cadential };

std::string to_string(BoundaryCue cue);

struct BoundaryCandidate {
    double onset_qn = 0.0;
    BoundaryCue cue = BoundaryCue::Silence;
};

struct Segment {
    int segment_id = 0;
    std::string movement_id;
    double start_qn = 0.0;
    double end_qn = 0.0;
    std::vector<long> member_instance_ids;   // ordered by first-note onset
};

struct SegmentationConfig {
    double silence_min_qn = 1.0;    // minimal true-silence gap across all voices
    double min_span_measures = 8.0; // minimal span between adjacent accepted boundaries
    bool cadential_cue = true;      // D->T function-zone transition proxy
    double proximity_measures = 1.0;// window of the cue-preference rule
};

/// Monotone map from score time (quarter notes) to a fractional measure
/// position, interpolated from the notes' measure annotations.
class MeasureMap {
public:
    explicit MeasureMap(const Movement& movement);
    double measure_position(double onset_qn) const;

private:
    std::vector<double> starts_;    // onset of each knot
    std::vector<double> measures_;  // measure number of each knot
};

/// Boundary candidates from the three cues: true-silence gaps, repeated
/// pitches separated by at least a quarter note, and D->T harmony
/// transitions. Sorted by onset and deduplicated at the onset tolerance.
std::vector<BoundaryCandidate> propose_boundaries(const Movement& movement,
                                                  const SegmentationConfig& config);

/// Drops candidates inside motif-instance spans, then greedily enforces
/// the minimum span between kept boundaries, preferring silence and
/// repeated-pitch cues over cadential ones within the proximity window.
std::vector<BoundaryCandidate> filter_boundaries(const std::vector<BoundaryCandidate>& candidates,
                                                 const Movement& movement,
                                                 const MeasureMap& measure_map,
                                                 const SegmentationConfig& config);

struct SegmentationResult {
    std::map<std::string, std::vector<Segment>> segments;   // keyed by movement_id
    std::vector<Diagnostic> diagnostics;
};

/// Partitions every movement and assigns each motif instance the segment
/// containing its first note. Mutates instances' segment_id.
SegmentationResult segment_corpus(Corpus& corpus, const SegmentationConfig& config);

}  // namespace motifcrf
