#include <gtest/gtest.h>

#include <map>
#include <random>

#include "crashbench/classify.hpp"
#include "crashbench/ingest.hpp"
#include "crashbench/report.hpp"
#include "generators.hpp"

using namespace crashbench;

namespace {

const std::filesystem::path kFixtures = CRASHBENCH_FIXTURES;

using gen::random_corpus;
CrashRecord base() { return gen::base_record(); }

std::vector<ClassifiedRecord> fixture_corpus() {
    auto parsed = parse_sgo_file(kFixtures / "ads" / "sgo_reports.csv");
    return classify_all(parsed.records);
}

} // namespace

TEST(CrashTypeRules, Precedence) {
    auto r = base();
    r.sequence_position = 2;
    r.partner->body_class = BodyClass::Motorcycle;
    EXPECT_EQ(classify_crash_type(r).group, CrashGroup::SecondaryCrash);  // secondary beats VRU partner

    r = base();
    r.partner->body_class = BodyClass::Pedestrian;
    EXPECT_EQ(classify_crash_type(r).group, CrashGroup::Pedestrian);
    r.partner->body_class = BodyClass::Cyclist;
    EXPECT_EQ(classify_crash_type(r).group, CrashGroup::Cyclist);
    r.partner->body_class = BodyClass::Motorcycle;
    EXPECT_EQ(classify_crash_type(r).group, CrashGroup::Motorcycle);
    r.partner->body_class = BodyClass::FixedObjectOrGround;
    EXPECT_EQ(classify_crash_type(r).group, CrashGroup::SingleVehicle);
    r.partner.reset();
    EXPECT_EQ(classify_crash_type(r).group, CrashGroup::SingleVehicle);

    const std::map<Configuration, CrashGroup> v2v{
        {Configuration::Backing, CrashGroup::V2VBacking},
        {Configuration::FrontToRear, CrashGroup::V2VF2R},
        {Configuration::OppositeDirection, CrashGroup::V2VOppositeDirection},
        {Configuration::IntersectionTurningOrCrossing, CrashGroup::V2VIntersection},
        {Configuration::LateralSameDirection, CrashGroup::V2VLateral},
        {Configuration::SingleVehicle, CrashGroup::Other},
        {Configuration::OtherOrUnknown, CrashGroup::Other},
    };
    for (auto [config, group] : v2v) {
        r = base();
        r.configuration = config;
        EXPECT_EQ(classify_crash_type(r).group, group) << to_string(config);
    }
    r = base();
    r.partner->body_class = BodyClass::HeavyVehicle;
    EXPECT_EQ(classify_crash_type(r).group, CrashGroup::V2VF2R);
}

TEST(CrashTypeRules, F2RRoleFromAnnotationThenOrder) {
    auto r = base();
    r.annotations.f2r_role = F2RRole::Struck;
    EXPECT_EQ(classify_crash_type(r).f2r_role, F2RRole::Struck);
    r.annotations.f2r_role.reset();
    EXPECT_EQ(classify_crash_type(r).f2r_role, F2RRole::Striking);  // subject role 1 leads
    r.subject.role_order = 3;
    EXPECT_EQ(classify_crash_type(r).f2r_role, F2RRole::Struck);
}

TEST(Outcomes, Examples) {
    auto r = base();
    r.severity.max_injury = InjuryLevel::K;
    r.severity.police_confirmed_serious = true;
    auto s = classify_outcomes(r);
    EXPECT_TRUE(s.contains(OutcomeLevel::AnyPropertyDamageOrInjury));
    EXPECT_TRUE(s.contains(OutcomeLevel::AnyInjuryReported));
    EXPECT_TRUE(s.contains(OutcomeLevel::SuspectedSeriousInjuryPlus));

    r = base();
    r.severity.max_injury = InjuryLevel::A;  // reported serious, police says otherwise
    r.severity.police_confirmed_serious = false;
    s = classify_outcomes(r);
    EXPECT_TRUE(s.contains(OutcomeLevel::AnyInjuryReported));
    EXPECT_FALSE(s.contains(OutcomeLevel::SuspectedSeriousInjuryPlus));

    r = base();
    r.severity.any_airbag_any_vehicle = true;
    EXPECT_EQ(classify_outcomes(r),
              (OutcomeSet{OutcomeLevel::AnyPropertyDamageOrInjury, OutcomeLevel::AirbagDeployment}));

    r = base();
    r.severity.max_injury = InjuryLevel::UnknownWithInjuryAllegation;
    r.severity.police_reported = true;
    s = classify_outcomes(r);
    EXPECT_TRUE(s.contains(OutcomeLevel::AnyInjuryReported));
    EXPECT_TRUE(s.contains(OutcomeLevel::PoliceReported));
}

TEST(Movement, Examples) {
    EXPECT_EQ(classify_pre_crash_movement({6.0, 0.0}), PreCrashMovement::Stopped5s);
    EXPECT_EQ(classify_pre_crash_movement({5.0, 9.0}), PreCrashMovement::Stopped5s);
    EXPECT_EQ(classify_pre_crash_movement({4.99, 0.5}), PreCrashMovement::ConstantOrAccelerating);
    EXPECT_EQ(classify_pre_crash_movement({0.0, 3.6}), PreCrashMovement::HardBraking);
    EXPECT_THROW(classify_pre_crash_movement({-1.0, 0.0}), InvalidInput);
    EXPECT_THROW(classify_pre_crash_movement({0.0, -0.1}), InvalidInput);
}

TEST(Movement, BoundaryProbes) {
    EXPECT_EQ(classify_pre_crash_movement({0.0, 0.74}), PreCrashMovement::ConstantOrAccelerating);
    EXPECT_EQ(classify_pre_crash_movement({0.0, 0.75}), PreCrashMovement::ModerateBraking);
    EXPECT_EQ(classify_pre_crash_movement({0.0, 3.49}), PreCrashMovement::ModerateBraking);
    EXPECT_EQ(classify_pre_crash_movement({0.0, 3.5}), PreCrashMovement::HardBraking);
}

TEST(Movement, OnlyForStruckF2RWithKinematics) {
    auto r = base();
    r.annotations.f2r_role = F2RRole::Struck;
    r.annotations.pre_crash_kinematics = Kinematics{0.0, 1.0};
    EXPECT_EQ(classify(r).movement, PreCrashMovement::ModerateBraking);
    r.annotations.f2r_role = F2RRole::Striking;
    EXPECT_FALSE(classify(r).movement.has_value());
    r.annotations.f2r_role = F2RRole::Struck;
    r.configuration = Configuration::Backing;
    EXPECT_FALSE(classify(r).movement.has_value());
}

// Properties over a random corpus.
TEST(ClassifyProperty, PartitionLatticeAndRoleInvariant) {
    auto corpus = random_corpus(5000, 7);
    auto out = classify_all(corpus);
    std::map<CrashGroup, std::size_t> tally;
    for (const auto& c : out) {
        ++tally[c.crash_type.group];
        EXPECT_TRUE(c.crash_type.valid());
        std::size_t hits = 0;
        for (const auto& k : all_crash_type_keys()) {
            if (!k.is_aggregate() && !k.f2r_role && k.matches(c.crash_type)) ++hits;
        }
        EXPECT_EQ(hits, 1u);
        if (c.outcomes.contains(OutcomeLevel::SuspectedSeriousInjuryPlus))
            EXPECT_TRUE(c.outcomes.contains(OutcomeLevel::AnyInjuryReported));
        if (c.record.subject.in_transport && c.outcomes.contains(OutcomeLevel::AnyInjuryReported))
            EXPECT_TRUE(c.outcomes.contains(OutcomeLevel::AnyPropertyDamageOrInjury));
    }
    std::size_t total = 0;
    for (auto [g, n] : tally) total += n;
    EXPECT_EQ(total, corpus.size());
    EXPECT_EQ(tally.size(), kCrashGroupCount);  // the corpus reaches every group
}

TEST(ClassifyProperty, IdempotentThroughCsv) {
    auto once = classify_all(random_corpus(800, 11));
    auto again = classified_from_csv(parse_csv(classified_to_csv(once)));
    ASSERT_EQ(again.size(), once.size());
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(again[i], once[i]) << i;
    std::vector<CrashRecord> records;
    for (const auto& c : once) records.push_back(c.record);
    EXPECT_EQ(classify_all(records), once);
}

TEST(ClassifyProperty, ThreadCountDoesNotMatter) {
    auto corpus = random_corpus(3000, 3);
    EXPECT_EQ(classify_all(corpus, 1), classify_all(corpus, 4));
}

TEST(ClassifyCsv, StoredLabelMismatchIsParseError) {
    auto out = classify_all(random_corpus(5, 1));
    auto table = parse_csv(classified_to_csv(out));
    const auto col = table.require_column("crash_type", "test");
    table.rows[0][col] = table.rows[0][col] == "Other" ? "Cyclist" : "Other";
    EXPECT_THROW(classified_from_csv(table), ParseError);
}

TEST(Fixture, EventCountsReproduceReference) {
    auto corpus = fixture_corpus();
    auto counts = event_counts(corpus);
    ASSERT_EQ(counts.totals.size(), 3u);
    EXPECT_DOUBLE_EQ(counts.totals[0], 48.0);
    EXPECT_DOUBLE_EQ(counts.totals[1], 18.0);
    EXPECT_DOUBLE_EQ(counts.totals[2], 2.0);
    auto at = [&](CrashGroup g, int outcome) { return counts.by_group[static_cast<std::size_t>(g)][outcome]; };
    EXPECT_DOUBLE_EQ(at(CrashGroup::V2VF2R, 0), 25.0);
    EXPECT_DOUBLE_EQ(at(CrashGroup::V2VF2R, 1), 7.0);
    EXPECT_DOUBLE_EQ(at(CrashGroup::V2VIntersection, 1), 5.0);
    EXPECT_DOUBLE_EQ(at(CrashGroup::SecondaryCrash, 2), 2.0);
}

TEST(Fixture, StruckMovementCounts) {
    auto corpus = fixture_corpus();
    std::map<std::pair<OutcomeLevel, PreCrashMovement>, int> n;
    for (const auto& c : corpus) {
        if (!c.movement) continue;
        for (auto o : {OutcomeLevel::AnyInjuryReported, OutcomeLevel::AirbagDeployment})
            if (c.outcomes.contains(o)) ++n[{o, *c.movement}];
    }
    using M = PreCrashMovement;
    const auto inj = OutcomeLevel::AnyInjuryReported;
    const auto bag = OutcomeLevel::AirbagDeployment;
    EXPECT_EQ(n[std::pair(inj, M::Stopped5s)], 5);
    EXPECT_EQ(n[std::pair(inj, M::ConstantOrAccelerating)], 3);
    EXPECT_EQ(n[std::pair(inj, M::ModerateBraking)], 11);
    EXPECT_EQ(n[std::pair(inj, M::HardBraking)], 6);
    EXPECT_EQ(n[std::pair(bag, M::Stopped5s)], 5);
    EXPECT_EQ(n[std::pair(bag, M::ConstantOrAccelerating)], 1);
    EXPECT_EQ(n[std::pair(bag, M::ModerateBraking)], 1);
    EXPECT_EQ(n[std::pair(bag, M::HardBraking)], 0);
}
