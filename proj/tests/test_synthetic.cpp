#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "common.hpp"
#include "synthetic.hpp"
#include "table.hpp"

using namespace survkit;

namespace {

SynthSpec small_spec() {
    SynthSpec spec;
    spec.rows = 60;
    spec.n_numeric = 4;
    spec.n_categorical = 2;
    spec.n_genes = 20;
    spec.n_cna = 3;
    spec.n_mutation = 2;
    spec.informative = 3;
    spec.seed = 5;
    return spec;
}

std::size_t frame_missing(const TableFrame& frame) {
    std::size_t total = 0;
    for (const auto& col : frame.columns()) total += col.missing_count();
    return total;
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
    const SynthSpec spec = small_spec();
    const SynthData a = generate_synthetic(spec);
    const SynthData b = generate_synthetic(spec);
    CHECK(format_table(a.clinical) == format_table(b.clinical));
    CHECK(format_table(a.expression) == format_table(b.expression));
    CHECK(format_table(a.cna) == format_table(b.cna));
    CHECK(format_table(a.mutation) == format_table(b.mutation));

    SynthSpec other = spec;
    other.seed = 6;
    CHECK(format_table(generate_synthetic(other).clinical) != format_table(a.clinical));
}

TEST_CASE("frame shapes follow the requested counts") {
    const SynthSpec spec = small_spec();
    const SynthData d = generate_synthetic(spec);
    CHECK(d.clinical.n_rows() == spec.rows);
    CHECK(d.clinical.n_cols() == 1 + spec.n_numeric + spec.n_categorical + 3);
    CHECK(d.expression.n_cols() == 1 + spec.n_genes);
    CHECK(d.cna.n_cols() == 1 + spec.n_cna);
    CHECK(d.mutation.n_cols() == 1 + spec.n_mutation);
    for (const TableFrame* f : {&d.expression, &d.cna, &d.mutation}) {
        CHECK(f->n_rows() == spec.rows);
        CHECK(f->patient_ids() == d.clinical.patient_ids());
    }
    CHECK(d.clinical.has_column("OS_MONTHS"));
    CHECK(d.clinical.has_column("OS_STATUS"));
    CHECK(d.clinical.has_column("VITAL_CAUSE"));
}

TEST_CASE("a zero missing rate leaves every cell filled") {
    SynthSpec spec = small_spec();
    spec.missing_rate = 0.0;
    const SynthData d = generate_synthetic(spec);
    CHECK(frame_missing(d.clinical) == 0);
    CHECK(frame_missing(d.expression) == 0);
    CHECK(frame_missing(d.cna) == 0);
    CHECK(frame_missing(d.mutation) == 0);
}

TEST_CASE("the censored fraction tracks the requested rate") {
    SynthSpec spec = small_spec();
    spec.rows = 2000;
    spec.unlabeled_fraction = 0.3;
    spec.missing_rate = 0.0;
    const SynthData d = generate_synthetic(spec);
    const Column& months = d.clinical.column("OS_MONTHS");
    const Column& status = d.clinical.column("OS_STATUS");
    std::size_t censored = 0;
    for (std::size_t i = 0; i < spec.rows; ++i) {
        if (status.text[i] == "LIVING" && months.numeric[i] < 120.0) ++censored;
    }
    const double fraction = static_cast<double>(censored) / 2000.0;
    CHECK(fraction > 0.25);
    CHECK(fraction < 0.35);
}

TEST_CASE("survival responses respect the ten-year horizon") {
    SynthSpec spec = small_spec();
    spec.rows = 500;
    const SynthData d = generate_synthetic(spec);
    const Column& months = d.clinical.column("OS_MONTHS");
    const Column& status = d.clinical.column("OS_STATUS");
    const Column& cause = d.clinical.column("VITAL_CAUSE");
    for (std::size_t i = 0; i < spec.rows; ++i) {
        CHECK(months.numeric[i] > 0.0);
        if (status.text[i] == "DIED") {
            CHECK(cause.text[i] == "DISEASE");
            CHECK(months.numeric[i] <= 120.0);
        } else {
            CHECK(status.text[i] == "LIVING");
            CHECK(cause.text[i] == "NONE");
        }
    }
}

TEST_CASE("expression holes land only in noise genes") {
    SynthSpec spec = small_spec();
    spec.rows = 200;
    spec.missing_rate = 0.2;
    const SynthData d = generate_synthetic(spec);
    std::size_t holes = 0;
    for (std::size_t c = 1; c < d.expression.n_cols(); ++c) {
        const std::size_t count = d.expression.column(c).missing_count();
        if (c <= spec.informative) CHECK(count == 0);
        holes += count;
    }
    CHECK(holes > 0);
    CHECK(frame_missing(d.cna) == 0);
    CHECK(frame_missing(d.mutation) == 0);
}

TEST_CASE("informative numerics separate the outcome groups") {
    SynthSpec spec = small_spec();
    spec.rows = 1000;
    spec.label_noise = 0.0;
    spec.missing_rate = 0.0;
    spec.unlabeled_fraction = 0.0;
    const SynthData d = generate_synthetic(spec);
    const Column& feature = d.clinical.column("NUM_01");
    const Column& status = d.clinical.column("OS_STATUS");
    double died_sum = 0.0, living_sum = 0.0;
    std::size_t died_n = 0, living_n = 0;
    for (std::size_t i = 0; i < spec.rows; ++i) {
        if (status.text[i] == "DIED") {
            died_sum += feature.numeric[i];
            ++died_n;
        } else {
            living_sum += feature.numeric[i];
            ++living_n;
        }
    }
    REQUIRE(died_n > 100);
    REQUIRE(living_n > 100);
    CHECK(died_sum / died_n - living_sum / living_n > 0.5);
}

TEST_CASE("impossible settings are rejected") {
    SynthSpec spec;
    spec.rows = 10;
    CHECK_THROWS_AS(spec.validate(), Error);

    spec = SynthSpec{};
    spec.informative = spec.n_numeric + 1;
    CHECK_THROWS_AS(spec.validate(), Error);

    spec = SynthSpec{};
    spec.label_noise = 0.6;
    CHECK_THROWS_AS(spec.validate(), Error);

    spec = SynthSpec{};
    spec.missing_rate = 0.5;
    CHECK_THROWS_AS(spec.validate(), Error);

    spec = SynthSpec{};
    spec.unlabeled_fraction = 1.0;
    CHECK_THROWS_AS(spec.validate(), Error);
}
