#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "motifcrf/errors.hpp"
#include "motifcrf/rng.hpp"
#include "motifcrf/segmentation.hpp"

using namespace motifcrf;

namespace {

/// quarter-note melody across [0, n) with 4-qn measures
Movement quarters(const std::string& id, int n, int pitch_base = 60) {
    Movement mv;
    mv.movement_id = id;
    for (int k = 0; k < n; ++k) {
        NoteEvent note = test::note(k, static_cast<double>(k), 1.0, pitch_base + (k * 5) % 17);
        note.measure = k / 4 + 1;
        note.beat = static_cast<double>(k % 4) + 1.0;
        mv.notes.push_back(note);
    }
    HarmonyEvent h{0.0, "C", FunctionZone::Tonic, false, 1.0};
    mv.harmony = {h};
    return mv;
}

MotifInstance instance_over(Movement& mv, long iid, const std::vector<long>& ids) {
    MotifInstance inst;
    inst.motif_class_id = 1;
    inst.instance_id = iid;
    inst.note_ids = ids;
    mv.instances.push_back(inst);
    return inst;
}

}  // namespace

TEST_CASE("silence gap produces a boundary at the gap start") {
    Movement mv;
    mv.movement_id = "m";
    // notes covering [0, 8], then a rest until 10
    for (int k = 0; k < 8; ++k) mv.notes.push_back(test::note(k, k, 1.0, 60 + k, 1.0, k / 4 + 1));
    mv.notes.push_back(test::note(8, 10.0, 1.0, 72, 3.0, 3));
    mv.notes.push_back(test::note(9, 11.0, 1.0, 74, 4.0, 3));
    mv.harmony = test::tonic_track();

    SegmentationConfig cfg;
    const auto cands = propose_boundaries(mv, cfg);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].cue == BoundaryCue::Silence);
    CHECK(cands[0].onset_qn == doctest::Approx(8.0));
}

TEST_CASE("repeated pitch produces a boundary after the second note") {
    Movement mv;
    mv.movement_id = "m";
    mv.notes.push_back(test::note(0, 0.0, 4.0, 60));
    mv.notes.push_back(test::note(1, 4.0, 1.5, 67, 1.0, 2));
    mv.notes.push_back(test::note(2, 5.5, 0.5, 67, 2.5, 2));
    mv.notes.push_back(test::note(3, 6.0, 4.0, 62, 3.0, 2));
    mv.harmony = test::tonic_track();

    SegmentationConfig cfg;
    const auto cands = propose_boundaries(mv, cfg);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].cue == BoundaryCue::RepeatedPitch);
    CHECK(cands[0].onset_qn == doctest::Approx(6.0));   // 5.5 + duration 0.5
}

TEST_CASE("repeated pitch closer than a quarter note does not fire") {
    Movement mv;
    mv.movement_id = "m";
    mv.notes.push_back(test::note(0, 0.0, 0.5, 67));
    mv.notes.push_back(test::note(1, 0.5, 0.5, 67, 1.5));
    mv.notes.push_back(test::note(2, 1.0, 4.0, 62, 2.0));
    mv.harmony = test::tonic_track();
    CHECK(propose_boundaries(mv, SegmentationConfig{}).empty());
}

TEST_CASE("continuous legato texture yields no candidates") {
    Movement mv = quarters("m", 16);
    CHECK(propose_boundaries(mv, SegmentationConfig{}).empty());
}

TEST_CASE("cadential cue fires on D to T transitions") {
    Movement mv = quarters("m", 16);
    mv.harmony.clear();
    mv.harmony.push_back({0.0, "C", FunctionZone::Tonic, false, 1.0});
    mv.harmony.push_back({4.0, "C", FunctionZone::Dominant, false, 1.0});
    mv.harmony.push_back({8.0, "C", FunctionZone::Tonic, false, 1.0});

    auto cands = propose_boundaries(mv, SegmentationConfig{});
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].cue == BoundaryCue::Cadential);
    CHECK(cands[0].onset_qn == doctest::Approx(8.0));

    SegmentationConfig off;
    off.cadential_cue = false;
    CHECK(propose_boundaries(mv, off).empty());
}

TEST_CASE("empty movement is rejected") {
    Movement mv;
    mv.movement_id = "m";
    CHECK_THROWS_AS(propose_boundaries(mv, SegmentationConfig{}), EmptyMovement);
}

TEST_CASE("candidates inside motif spans are removed") {
    Movement mv = quarters("m", 40);
    instance_over(mv, 0, {10, 11, 12, 13});   // span [10, 14]
    const MeasureMap mmap(mv);
    const std::vector<BoundaryCandidate> cands = {{12.0, BoundaryCue::Silence}};
    CHECK(filter_boundaries(cands, mv, mmap, SegmentationConfig{}).empty());
}

TEST_CASE("silence is preferred over cadential within one measure") {
    Movement mv = quarters("m", 80);   // 20 measures
    const MeasureMap mmap(mv);
    // candidates at measure 16 (qn 60) and 16.5 (qn 62)
    const std::vector<BoundaryCandidate> cands = {{60.0, BoundaryCue::Cadential},
                                                  {62.0, BoundaryCue::Silence}};
    const auto kept = filter_boundaries(cands, mv, mmap, SegmentationConfig{});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].cue == BoundaryCue::Silence);
    CHECK(kept[0].onset_qn == doctest::Approx(62.0));
}

TEST_CASE("minimum span drops close boundaries") {
    Movement mv = quarters("m", 80);
    const MeasureMap mmap(mv);
    // measure 8 = qn 28, measure 12 = qn 44: span 4 measures < 8
    const std::vector<BoundaryCandidate> cands = {{28.0, BoundaryCue::Silence},
                                                  {44.0, BoundaryCue::Silence}};
    const auto kept = filter_boundaries(cands, mv, mmap, SegmentationConfig{});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].onset_qn == doctest::Approx(28.0));
}

TEST_CASE("boundaries at least min span apart survive") {
    Movement mv = quarters("m", 80);
    const MeasureMap mmap(mv);
    // measures 8 and 16
    const std::vector<BoundaryCandidate> cands = {{28.0, BoundaryCue::Silence},
                                                  {60.0, BoundaryCue::RepeatedPitch}};
    const auto kept = filter_boundaries(cands, mv, mmap, SegmentationConfig{});
    CHECK(kept.size() == 2);
}

TEST_CASE("segment_corpus with no boundaries gives one segment") {
    Corpus corpus;
    Movement mv = quarters("m", 16);
    instance_over(mv, 0, {0, 1, 2});
    instance_over(mv, 1, {8, 9});
    corpus.movements["m"] = mv;

    const auto result = segment_corpus(corpus, SegmentationConfig{});
    const auto& segs = result.segments.at("m");
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].start_qn == doctest::Approx(0.0));
    CHECK(segs[0].end_qn == doctest::Approx(16.0));
    CHECK(segs[0].member_instance_ids == std::vector<long>{0, 1});
    CHECK(corpus.movements.at("m").instances[0].segment_id == 0);
}

TEST_CASE("two boundaries give three segments with onset-based membership") {
    Corpus corpus;
    Movement mv;
    mv.movement_id = "m";
    // three blocks of melody separated by 2-qn silences at [34,36) and [70,72)
    long id = 0;
    auto block = [&](double start, int count) {
        for (int k = 0; k < count; ++k) {
            const double onset = start + k;
            NoteEvent n = test::note(id++, onset, 1.0, 60 + (k * 3) % 12);
            n.measure = static_cast<int>(onset / 4.0) + 1;
            n.beat = std::fmod(onset, 4.0) + 1.0;
            mv.notes.push_back(n);
        }
    };
    block(0.0, 34);    // ends at 34
    block(36.0, 34);   // ends at 70
    block(72.0, 12);   // ends at 84
    mv.harmony = test::tonic_track();
    instance_over(mv, 0, {0, 1, 2});
    instance_over(mv, 1, {40, 41});
    instance_over(mv, 2, {70, 71});
    corpus.movements["m"] = mv;

    const auto result = segment_corpus(corpus, SegmentationConfig{});
    const auto& segs = result.segments.at("m");
    REQUIRE(segs.size() == 3);
    CHECK(segs[0].member_instance_ids == std::vector<long>{0});
    CHECK(segs[1].member_instance_ids == std::vector<long>{1});
    CHECK(segs[2].member_instance_ids == std::vector<long>{2});
    // partition property
    CHECK(segs[0].start_qn == doctest::Approx(0.0));
    for (std::size_t k = 1; k < segs.size(); ++k)
        CHECK(segs[k].start_qn == doctest::Approx(segs[k - 1].end_qn));
    CHECK(segs.back().end_qn == doctest::Approx(84.0));
}

TEST_CASE("partition property holds on randomized movements") {
    Rng rng(31337, 0);
    for (int trial = 0; trial < 25; ++trial) {
        Corpus corpus;
        Movement mv;
        mv.movement_id = "m";
        long id = 0;
        double onset = 0.0;
        const int n = 30 + static_cast<int>(rng.bounded(40));
        for (int k = 0; k < n; ++k) {
            const double dur = 0.5 + 0.5 * static_cast<double>(rng.bounded(4));
            NoteEvent note =
                test::note(id++, onset, dur, 48 + static_cast<int>(rng.bounded(24)));
            note.measure = static_cast<int>(onset / 4.0) + 1;
            note.beat = std::fmod(onset, 4.0) + 1.0;
            mv.notes.push_back(note);
            onset += dur + (rng.bounded(8) == 0 ? 1.5 : 0.0);   // occasional rest
        }
        HarmonyEvent h{0.0, "C", FunctionZone::Tonic, false, 1.0};
        HarmonyEvent d{onset / 2.0, "C", FunctionZone::Dominant, false, 1.0};
        HarmonyEvent t{onset / 2.0 + 2.0, "C", FunctionZone::Tonic, false, 1.0};
        mv.harmony = {h, d, t};
        for (int k = 0; k + 3 < n; k += 7)
            instance_over(mv, k / 7, {k, k + 1, k + 2});
        corpus.movements["m"] = mv;

        const double span_start = mv.span_start_qn();
        const double span_end = mv.span_end_qn();
        const SegmentationConfig scfg;
        const auto result = segment_corpus(corpus, scfg);
        const auto& segs = result.segments.at("m");
        REQUIRE(!segs.empty());
        CHECK(segs.front().start_qn == doctest::Approx(span_start));
        CHECK(segs.back().end_qn == doctest::Approx(span_end));
        const MeasureMap mmap(mv);
        for (std::size_t k = 1; k < segs.size(); ++k)
            CHECK(segs[k].start_qn == doctest::Approx(segs[k - 1].end_qn));
        // consecutive accepted boundaries are at least min_span_measures apart
        for (std::size_t k = 2; k < segs.size(); ++k) {
            const double prev_boundary = segs[k - 1].start_qn;
            const double next_boundary = segs[k].start_qn;
            CHECK(mmap.measure_position(next_boundary) - mmap.measure_position(prev_boundary) >=
                  scfg.min_span_measures - 1e-6);
        }
        // every instance assigned exactly once
        for (const auto& inst : corpus.movements.at("m").instances)
            CHECK(inst.segment_id >= 0);
    }
}

TEST_CASE("segmentation is deterministic") {
    auto build = [] {
        Corpus corpus;
        Movement mv = quarters("m", 60);
        instance_over(mv, 0, {3, 4, 5});
        instance_over(mv, 1, {30, 31});
        corpus.movements["m"] = mv;
        return corpus;
    };
    Corpus a = build(), b = build();
    const auto ra = segment_corpus(a, SegmentationConfig{});
    const auto rb = segment_corpus(b, SegmentationConfig{});
    REQUIRE(ra.segments.at("m").size() == rb.segments.at("m").size());
    for (std::size_t k = 0; k < ra.segments.at("m").size(); ++k) {
        CHECK(ra.segments.at("m")[k].start_qn == rb.segments.at("m")[k].start_qn);
        CHECK(ra.segments.at("m")[k].end_qn == rb.segments.at("m")[k].end_qn);
    }
}

TEST_CASE("no accepted boundary inside any motif span") {
    Rng rng(777, 0);
    for (int trial = 0; trial < 10; ++trial) {
        Corpus corpus;
        Movement mv;
        mv.movement_id = "m";
        long id = 0;
        double onset = 0.0;
        for (int k = 0; k < 50; ++k) {
            const double dur = 0.5 + 0.25 * static_cast<double>(rng.bounded(6));
            NoteEvent note = test::note(id++, onset, dur, 50 + static_cast<int>(rng.bounded(20)));
            note.measure = static_cast<int>(onset / 4.0) + 1;
            note.beat = std::fmod(onset, 4.0) + 1.0;
            mv.notes.push_back(note);
            onset += dur + (rng.bounded(6) == 0 ? 1.25 : 0.0);
        }
        mv.harmony = test::tonic_track();
        for (int k = 0; k + 4 < 50; k += 9)
            instance_over(mv, k, {k, k + 1, k + 2, k + 3});
        corpus.movements["m"] = mv;

        const auto result = segment_corpus(corpus, SegmentationConfig{});
        const auto& segs = result.segments.at("m");
        for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
            const double b = segs[k].end_qn;
            for (const auto& inst : corpus.movements.at("m").instances) {
                double s = 1e300, e = -1e300;
                for (long nid : inst.note_ids) {
                    const NoteEvent* n = corpus.movements.at("m").find_note(nid);
                    s = std::min(s, n->onset_qn);
                    e = std::max(e, n->offset_qn());
                }
                CHECK(!(b > s + 1e-6 && b < e - 1e-6));
            }
        }
    }
}
