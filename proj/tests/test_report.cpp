#include <cmath>

#include "doctest.h"
#include "handuse/error.hpp"
#include "handuse/report.hpp"

using namespace handuse;

namespace {

std::vector<ParticipantMeasures> cohort(std::size_t n) {
    std::vector<ParticipantMeasures> out;
    for (std::size_t i = 0; i < n; ++i) {
        ParticipantMeasures p;
        p.participant_id = "P" + std::to_string(i);
        const double t = static_cast<double>(i);
        p.dominant.perc = 0.1 + 0.05 * t;
        p.dominant.dur_s = 10 + static_cast<double>((i * 7) % 5);
        p.dominant.num_per_hour = 50 + 3 * t;
        p.nondominant.perc = 0.3 - 0.01 * t;
        p.nondominant.dur_s = 8 + t;
        p.nondominant.num_per_hour = 70 - 2 * t;
        p.bilateral = bilateral(p.dominant, p.nondominant);
        out.push_back(p);
    }
    return out;
}

std::vector<ClinicalRecord> scores(std::size_t n) {
    std::vector<ClinicalRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        ClinicalRecord c;
        c.participant_id = "P" + std::to_string(i);
        const double t = static_cast<double>(i);
        c.uems_dominant = 5 + t;
        c.uems_nondominant = 20 - t;
        c.uems_total = *c.uems_dominant + *c.uems_nondominant;
        c.grassp_dominant.strength = 2 * t;
        c.grassp_dominant.sens_dorsal = 3;
        c.scim_self_care = static_cast<double>((i * 3) % 7);
        c.scim_total = 40 + t;
        out.push_back(c);
    }
    return out;
}

}  // namespace

TEST_CASE("block layout") {
    CHECK(block_rows(Block::BilateralVsBilateral) == std::vector<std::string>{"Perc_Bi", "Dur_Bi", "Num_Bi"});
    CHECK(block_rows(Block::NondominantVsUnilateral) == std::vector<std::string>{"Perc_NH", "Dur_NH", "Num_NH"});
    CHECK(block_cols(Block::DominantVsBilateral) ==
          std::vector<std::string>{"UEMS_tot", "SCIM_TOT", "SCIM_S", "SCIM_RS", "SCIM_M"});
    CHECK(block_cols(Block::DominantVsUnilateral).size() == 8);
    for (Block b : kAllBlocks) CHECK(parse_block(to_string(b)) == b);
}

TEST_CASE("correlation blocks mark missing and constant columns") {
    const auto m = cohort(8);
    const auto c = scores(8);
    const auto bi = correlate_block(m, c, Block::BilateralVsBilateral);
    CHECK(bi.cells.size() == 15);
    CHECK(bi.at(0, 0).status == stats::CellStatus::Undefined);  // UEMS_tot is constant here
    CHECK(bi.at(0, 1).status == stats::CellStatus::Ok);
    CHECK(bi.at(0, 3).status == stats::CellStatus::InsufficientN);  // SCIM_RS absent
    CHECK(std::isnan(bi.at(0, 3).rho));
    const auto uni = correlate_block(m, c, Block::DominantVsUnilateral);
    CHECK(uni.cells.size() == 24);
    CHECK(uni.at(0, 0).rho == doctest::Approx(1.0));   // Perc_DH vs UEMS
    CHECK(uni.at(0, 2).status == stats::CellStatus::Undefined);  // constant dorsal sensation
    const auto nh = correlate_block(m, c, Block::NondominantVsUnilateral);
    CHECK(nh.at(2, 0).rho == doctest::Approx(1.0));  // Num_NH and UEMS both decrease
}

TEST_CASE("matrix formats round-trip") {
    const auto mat = correlate_block(cohort(8), scores(8), Block::DominantVsUnilateral);
    for (Format f : {Format::Csv, Format::JsonLines}) {
        const auto text = emit(mat, f);
        const auto back = parse_matrix(text, f);
        CHECK(back.rows == mat.rows);
        CHECK(back.cols == mat.cols);
        REQUIRE(back.cells.size() == mat.cells.size());
        for (std::size_t i = 0; i < mat.cells.size(); ++i) {
            CHECK(back.cells[i].status == mat.cells[i].status);
            CHECK(back.cells[i].stars == mat.cells[i].stars);
            if (mat.cells[i].status == stats::CellStatus::Ok)
                CHECK(back.cells[i].rho == doctest::Approx(mat.cells[i].rho).epsilon(1e-5));
        }
        CHECK(emit(back, f) == text);
    }
    const auto heat = emit(mat, Format::Heatmap);
    CHECK(heat.rfind("row_label,col_label,rho,p,stars,strength\n", 0) == 0);
    CHECK_THROWS_AS(parse_matrix(heat, Format::Heatmap), ArgumentError);
}

TEST_CASE("dominance comparison") {
    const auto rows = dominance_comparison(cohort(8));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].measure == "Perc");
    REQUIRE(rows[0].test.has_value());
    CHECK(rows[0].dominant.median == doctest::Approx(0.275));
    const auto t = dominance_table(rows);
    CHECK(t.rows.size() == 3);
    Table tab{{"a", "b"}, {{"1", "x,y"}}};
    CHECK(emit(tab, Format::Csv) == "a,b\n1,\"x,y\"\n");
    CHECK_THROWS_AS(emit(tab, Format::Heatmap), ArgumentError);
}

TEST_CASE("format names") {
    CHECK(parse_format("csv") == Format::Csv);
    CHECK(parse_format("json-lines") == Format::JsonLines);
    CHECK(parse_format("heatmap-data") == Format::Heatmap);
    CHECK_THROWS_AS(parse_format("xml"), ArgumentError);
}
