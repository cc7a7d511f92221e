#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "motifcrf/score_model.hpp"

namespace motifcrf::test {

inline NoteEvent note(long id, double onset, double dur, int pitch, double beat = 1.0,
                      int measure = 1, double dyn = 4.0, int marks = 0) {
    NoteEvent n;
    n.note_id = id;
    n.onset_qn = onset;
    n.duration_qn = dur;
    n.midi_pitch = pitch;
    n.measure = measure;
    n.beat = beat;
    n.dynamic_level = dyn;
    n.expressive_marks = marks;
    return n;
}

/// Notes at unit spacing with measure/beat derived from a 4-qn measure.
inline std::vector<NoteEvent> melody(const std::vector<int>& pitches, double start = 0.0,
                                     double dur = 1.0, double step = 1.0) {
    std::vector<NoteEvent> notes;
    for (std::size_t k = 0; k < pitches.size(); ++k) {
        const double onset = start + static_cast<double>(k) * step;
        NoteEvent n = note(static_cast<long>(k), onset, dur, pitches[k]);
        n.measure = static_cast<int>(onset / 4.0) + 1;
        n.beat = onset - 4.0 * static_cast<double>(n.measure - 1) + 1.0;
        notes.push_back(n);
    }
    return notes;
}

inline std::vector<HarmonyEvent> tonic_track(const std::string& key = "C") {
    HarmonyEvent h;
    h.onset_qn = 0.0;
    h.local_key = key;
    h.function_zone = FunctionZone::Tonic;
    h.complexity = 1.0;
    return {h};
}

/// Unique scratch directory under the system temp root.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("motifcrf_" + tag + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace motifcrf::test
