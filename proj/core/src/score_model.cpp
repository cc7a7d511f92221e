#include "motifcrf/score_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "motifcrf/csv.hpp"
#include "motifcrf/errors.hpp"

namespace motifcrf {

std::string to_string(FunctionZone z) {
    switch (z) {
        case FunctionZone::Tonic: return "T";
        case FunctionZone::PreDominant: return "PD";
        case FunctionZone::Dominant: return "D";
    }
    return "?";
}

FunctionZone function_zone_from_string(const std::string& s) {
    if (s == "T") return FunctionZone::Tonic;
    if (s == "PD") return FunctionZone::PreDominant;
    if (s == "D") return FunctionZone::Dominant;
    throw Error("unknown function zone '" + s + "'");
}

const NoteEvent* Movement::find_note(long note_id) const {
    for (const auto& n : notes)
        if (n.note_id == note_id) return &n;
    return nullptr;
}

double Movement::span_start_qn() const {
    return notes.empty() ? 0.0 : notes.front().onset_qn;
}

double Movement::span_end_qn() const {
    double end = 0.0;
    for (const auto& n : notes) end = std::max(end, n.offset_qn());
    return end;
}

int tonic_pitch_class(const std::string& local_key) {
    if (local_key.empty()) throw Error("empty local_key");
    int pc;
    switch (std::tolower(static_cast<unsigned char>(local_key[0]))) {
        case 'c': pc = 0; break;
        case 'd': pc = 2; break;
        case 'e': pc = 4; break;
        case 'f': pc = 5; break;
        case 'g': pc = 7; break;
        case 'a': pc = 9; break;
        case 'b': pc = 11; break;
        default: throw Error("bad local_key '" + local_key + "'");
    }
    for (std::size_t i = 1; i < local_key.size(); ++i) {
        if (local_key[i] == '#')
            ++pc;
        else if (local_key[i] == 'b')
            --pc;
        else
            throw Error("bad accidental in local_key '" + local_key + "'");
    }
    return ((pc % 12) + 12) % 12;
}

namespace {

const HarmonyEvent* harmony_lookup(const std::vector<HarmonyEvent>& harmony, double t) {
    const HarmonyEvent* active = nullptr;
    for (const auto& h : harmony) {
        if (h.onset_qn <= t + kOnsetTol)
            active = &h;
        else
            break;
    }
    return active;
}

}  // namespace

FunctionZone zone_at(const std::vector<HarmonyEvent>& harmony, double t) {
    return harmony_at(harmony, t).function_zone;
}

const HarmonyEvent& harmony_at(const std::vector<HarmonyEvent>& harmony, double t) {
    const HarmonyEvent* h = harmony_lookup(harmony, t);
    if (!h) throw HarmonyGap("no harmony event covers onset " + std::to_string(t));
    return *h;
}

std::size_t Corpus::total_instances() const {
    std::size_t n = 0;
    for (const auto& [id, m] : movements) n += m.instances.size();
    return n;
}

Corpus load_corpus(const std::filesystem::path& notes_path,
                   const std::filesystem::path& harmony_path,
                   const std::filesystem::path& motifs_path) {
    Corpus corpus;

    {
        auto t = csv::read_file(notes_path);
        const auto c_mv = csv::column(t, "movement_id");
        const auto c_id = csv::column(t, "note_id");
        const auto c_on = csv::column(t, "onset_qn");
        const auto c_du = csv::column(t, "duration_qn");
        const auto c_pi = csv::column(t, "midi_pitch");
        const auto c_me = csv::column(t, "measure");
        const auto c_be = csv::column(t, "beat");
        const auto c_dy = csv::column(t, "dynamic_level");
        const auto c_ex = csv::column(t, "expressive_marks");
        for (const auto& r : t.rows) {
            NoteEvent n;
            n.note_id = csv::parse_long(t, r, c_id);
            n.onset_qn = csv::parse_double(t, r, c_on);
            n.duration_qn = csv::parse_double(t, r, c_du);
            n.midi_pitch = static_cast<int>(csv::parse_long(t, r, c_pi));
            n.measure = static_cast<int>(csv::parse_long(t, r, c_me));
            n.beat = csv::parse_double(t, r, c_be);
            n.dynamic_level = csv::parse_double(t, r, c_dy);
            n.expressive_marks = static_cast<int>(csv::parse_long(t, r, c_ex));
            if (n.midi_pitch < 0 || n.midi_pitch > 127)
                throw MalformedRow(t.path, r.line, "midi_pitch outside 0-127");
            if (r.fields[c_mv].find_first_of(",;#") != std::string::npos)
                throw MalformedRow(t.path, r.line, "movement_id contains a reserved character");
            auto& mv = corpus.movements[r.fields[c_mv]];
            mv.movement_id = r.fields[c_mv];
            mv.notes.push_back(n);
        }
    }

    for (auto& [id, mv] : corpus.movements) {
        std::sort(mv.notes.begin(), mv.notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
            if (a.onset_qn != b.onset_qn) return a.onset_qn < b.onset_qn;
            return a.note_id < b.note_id;
        });
        std::set<long> seen;
        for (const auto& n : mv.notes)
            if (!seen.insert(n.note_id).second)
                throw DuplicateNoteId("movement " + id + ": duplicate note_id " +
                                      std::to_string(n.note_id));
    }

    {
        auto t = csv::read_file(harmony_path);
        const auto c_mv = csv::column(t, "movement_id");
        const auto c_on = csv::column(t, "onset_qn");
        const auto c_ke = csv::column(t, "local_key");
        const auto c_fz = csv::column(t, "function_zone");
        const auto c_se = csv::column(t, "is_secondary");
        const auto c_cx = csv::column(t, "complexity");
        for (const auto& r : t.rows) {
            HarmonyEvent h;
            h.onset_qn = csv::parse_double(t, r, c_on);
            h.local_key = r.fields[c_ke];
            try {
                h.function_zone = function_zone_from_string(r.fields[c_fz]);
                tonic_pitch_class(h.local_key);
            } catch (const Error& e) {
                throw MalformedRow(t.path, r.line, e.what());
            }
            h.is_secondary = csv::parse_bool01(t, r, c_se);
            h.complexity = csv::parse_double(t, r, c_cx);
            auto it = corpus.movements.find(r.fields[c_mv]);
            if (it == corpus.movements.end())
                throw DanglingReference("harmony row for unknown movement '" + r.fields[c_mv] +
                                        "' (line " + std::to_string(r.line) + ")");
            it->second.harmony.push_back(h);
        }
    }

    for (auto& [id, mv] : corpus.movements)
        std::stable_sort(mv.harmony.begin(), mv.harmony.end(),
                         [](const HarmonyEvent& a, const HarmonyEvent& b) {
                             return a.onset_qn < b.onset_qn;
                         });

    {
        auto t = csv::read_file(motifs_path);
        const auto c_mv = csv::column(t, "movement_id");
        const auto c_cl = csv::column(t, "motif_class_id");
        const auto c_in = csv::column(t, "instance_id");
        const auto c_no = csv::column(t, "note_ids");
        for (const auto& r : t.rows) {
            auto it = corpus.movements.find(r.fields[c_mv]);
            if (it == corpus.movements.end())
                throw DanglingReference("motif row for unknown movement '" + r.fields[c_mv] +
                                        "' (line " + std::to_string(r.line) + ")");
            Movement& mv = it->second;
            MotifInstance inst;
            inst.motif_class_id = csv::parse_long(t, r, c_cl);
            inst.instance_id = csv::parse_long(t, r, c_in);
            inst.note_ids = csv::parse_id_list(t, r, c_no);
            for (long nid : inst.note_ids)
                if (!mv.find_note(nid))
                    throw DanglingReference("movement " + mv.movement_id + ": instance " +
                                            std::to_string(inst.instance_id) +
                                            " references missing note_id " + std::to_string(nid));
            // canonical note order inside the instance
            std::sort(inst.note_ids.begin(), inst.note_ids.end(), [&](long a, long b) {
                const NoteEvent* na = mv.find_note(a);
                const NoteEvent* nb = mv.find_note(b);
                if (na->onset_qn != nb->onset_qn) return na->onset_qn < nb->onset_qn;
                return a < b;
            });
            mv.instances.push_back(std::move(inst));
        }
    }

    for (auto& [id, mv] : corpus.movements) {
        std::sort(mv.instances.begin(), mv.instances.end(),
                  [&](const MotifInstance& a, const MotifInstance& b) {
                      const double oa = mv.find_note(a.note_ids.front())->onset_qn;
                      const double ob = mv.find_note(b.note_ids.front())->onset_qn;
                      if (oa != ob) return oa < ob;
                      if (a.motif_class_id != b.motif_class_id)
                          return a.motif_class_id < b.motif_class_id;
                      return a.instance_id < b.instance_id;
                  });
        std::set<long> seen;
        for (const auto& inst : mv.instances)
            if (!seen.insert(inst.instance_id).second)
                throw DanglingReference("movement " + id + ": duplicate instance_id " +
                                        std::to_string(inst.instance_id));
    }

    return corpus;
}

std::vector<Diagnostic> validate_corpus(const Corpus& corpus) {
    std::vector<Diagnostic> out;
    for (const auto& [id, mv] : corpus.movements) {
        for (const auto& n : mv.notes) {
            if (!(n.duration_qn > 0))
                out.push_back({id, "note " + std::to_string(n.note_id), "non-positive duration"});
            if (n.onset_qn < 0)
                out.push_back({id, "note " + std::to_string(n.note_id), "negative onset"});
            if (n.beat < 1)
                out.push_back({id, "note " + std::to_string(n.note_id), "beat below 1"});
            if (n.measure < 1)
                out.push_back({id, "note " + std::to_string(n.note_id), "measure below 1"});
            if (n.expressive_marks < 0)
                out.push_back(
                    {id, "note " + std::to_string(n.note_id), "negative expressive_marks"});
        }
        if (mv.harmony.empty() || std::fabs(mv.harmony.front().onset_qn) > kOnsetTol)
            out.push_back({id, "harmony", "no initial harmony"});
        for (std::size_t i = 1; i < mv.harmony.size(); ++i)
            if (mv.harmony[i].onset_qn < mv.harmony[i - 1].onset_qn)
                out.push_back({id, "harmony", "events not sorted by onset"});
        for (const auto& h : mv.harmony)
            if (h.complexity < 0)
                out.push_back({id, "harmony", "negative complexity"});
        for (const auto& inst : mv.instances) {
            if (inst.note_ids.empty()) {
                out.push_back(
                    {id, "instance " + std::to_string(inst.instance_id), "empty note list"});
                continue;
            }
            double prev = -1.0;
            for (long nid : inst.note_ids) {
                const NoteEvent* n = mv.find_note(nid);
                if (!n) {
                    out.push_back({id, "instance " + std::to_string(inst.instance_id),
                                   "dangling note_id " + std::to_string(nid)});
                    continue;
                }
                if (n->onset_qn < prev - kOnsetTol)
                    out.push_back({id, "instance " + std::to_string(inst.instance_id),
                                   "note_ids not ordered by onset"});
                prev = n->onset_qn;
            }
        }
    }
    return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& notes_path,
                 const std::filesystem::path& harmony_path,
                 const std::filesystem::path& motifs_path) {
    {
        std::ofstream out(notes_path);
        out << "movement_id,note_id,onset_qn,duration_qn,midi_pitch,measure,beat,"
               "dynamic_level,expressive_marks\n";
        for (const auto& [id, mv] : corpus.movements)
            for (const auto& n : mv.notes)
                out << id << ',' << n.note_id << ',' << csv::format_double(n.onset_qn) << ','
                    << csv::format_double(n.duration_qn) << ',' << n.midi_pitch << ','
                    << n.measure << ',' << csv::format_double(n.beat) << ','
                    << csv::format_double(n.dynamic_level) << ',' << n.expressive_marks << '\n';
    }
    {
        std::ofstream out(harmony_path);
        out << "movement_id,onset_qn,local_key,function_zone,is_secondary,complexity\n";
        for (const auto& [id, mv] : corpus.movements)
            for (const auto& h : mv.harmony)
                out << id << ',' << csv::format_double(h.onset_qn) << ',' << h.local_key << ','
                    << to_string(h.function_zone) << ',' << (h.is_secondary ? 1 : 0) << ','
                    << csv::format_double(h.complexity) << '\n';
    }
    {
        std::ofstream out(motifs_path);
        out << "movement_id,motif_class_id,instance_id,note_ids\n";
        for (const auto& [id, mv] : corpus.movements)
            for (const auto& inst : mv.instances) {
                out << id << ',' << inst.motif_class_id << ',' << inst.instance_id << ',';
                for (std::size_t i = 0; i < inst.note_ids.size(); ++i) {
                    if (i) out << ';';
                    out << inst.note_ids[i];
                }
                out << '\n';
            }
    }
}

}  // namespace motifcrf
