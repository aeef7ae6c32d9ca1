#include <catch_amalgamated.hpp>

#include <fstream>

#include "mfbounds/experiment.hpp"
#include "mfbounds/registry.hpp"
#include "support.hpp"

using namespace mfbounds;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

ExperimentConfig small_bm() {
    ExperimentConfig c;
    c.title = "small BM";
    c.n = 2000;
    c.horizon = 2000.0;
    c.seeds = {1};
    c.q_min = -3.0;
    c.q_max = 3.0;
    c.q_step = 0.5;
    c.reference_tau = tau_model::SelfSimilar{0.5};
    c.reference_spectrum = spectrum_model::SelfSimilar{0.5};
    c.figure = 1;
    return c;
}

bool contains(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

double max_deviation(const ModeResult& r, const std::vector<double>& qs, const ScalingFunction& ref, double lo, double hi) {
    double worst = 0.0;
    for (std::size_t i = 0; i < qs.size(); ++i)
        if (qs[i] >= lo - 1e-12 && qs[i] <= hi + 1e-12) worst = std::max(worst, std::abs(r.median.tau[i] - ref(qs[i])));
    return worst;
}

}  // namespace

TEST_CASE("run_experiment writes the manifest", "[harness]") {
    auto root = testing::fresh_dir("harness_manifest");
    auto rec = run_experiment(small_bm(), RunOptions{root, {}});
    REQUIRE(rec.status == "ok");
    for (const char* f : {"path.csv", "tau_standard.csv", "tau_modified.csv", "spectrum_standard.csv",
                          "spectrum_modified.csv", "config.json", "manifest.json", "figure1.svg"})
        CHECK(contains(rec.manifest, f));

    const std::filesystem::path dir = rec.directory;
    CHECK(dir == std::filesystem::absolute(root / rec.id).lexically_normal());
    for (const auto& f : rec.manifest) {
        INFO(f);
        REQUIRE(std::filesystem::exists(dir / f));
        const auto ext = std::filesystem::path(f).extension();
        if (ext == ".json") CHECK_NOTHROW(io::read_json(dir / f));
        if (ext == ".svg") CHECK(io::read_file(dir / f).rfind("<svg", 0) == 0);
    }
    CHECK(io::read_csv(dir / "tau_modified.csv", {"q", "tau_hat", "r2"}).size() == 12);
    CHECK(read_path(dir / "path.csv").values.size() == 2001);
    CHECK_NOTHROW(read_spectrum(dir / "spectrum_standard.csv"));
    CHECK(io::read_csv(dir / "partition_modified.csv", {"q", "delta_t", "S"}).size() > 0);

    auto manifest = io::read_json(dir / "manifest.json");
    CHECK(manifest.at("id") == rec.id);
}

TEST_CASE("re-running a config is idempotent", "[harness]") {
    auto root = testing::fresh_dir("harness_rerun");
    auto a = run_experiment(small_bm(), RunOptions{root, root / "a"});
    std::map<std::string, std::string> first;
    for (const auto& f : a.manifest) first[f] = io::read_file(std::filesystem::path(a.directory) / f);
    auto b = run_experiment(small_bm(), RunOptions{root, root / "a"});
    CHECK(a.id == b.id);
    CHECK(a.manifest == b.manifest);
    for (const auto& f : b.manifest) CHECK(io::read_file(std::filesystem::path(b.directory) / f) == first[f]);

    auto other = small_bm();
    other.seeds = {2};
    CHECK(run_id(other) != a.id);
}

TEST_CASE("pipeline failures are recorded", "[harness]") {
    auto root = testing::fresh_dir("harness_failed");
    auto c = small_bm();
    c.scales = 2;
    auto rec = run_experiment(c, RunOptions{root, {}});
    CHECK(rec.status == "failed");
    CHECK_THAT(rec.error, ContainsSubstring("regression needs at least 3 scales"));
    auto listed = registry_list(root);
    REQUIRE(listed.size() == 1);
    CHECK(listed[0].status == "failed");

    auto bad = small_bm();
    bad.seeds.clear();
    CHECK_THROWS_AS(run_experiment(bad, RunOptions{root, {}}), ValidationError);
    CHECK(registry_list(root).size() == 1);
}

TEST_CASE("registry", "[harness]") {
    auto root = testing::fresh_dir("harness_registry");
    CHECK(registry_list(root).empty());
    auto rec = run_experiment(small_bm(), RunOptions{root, {}});
    auto listed = registry_list(root);
    REQUIRE(listed.size() == 1);
    CHECK(listed[0].id == rec.id);
    CHECK(registry_get(root, rec.id).directory == rec.directory);
    CHECK_THROWS_AS(registry_get(root, "0000000000000000"), NotFoundError);

    {
        std::ofstream out(registry_file(root), std::ios::app);
        out << "{not json\n";
    }
    try {
        registry_list(root);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        CHECK_THAT(std::string(e.what()), ContainsSubstring(":2:"));
    }
}

TEST_CASE("config JSON", "[harness]") {
    auto c = figure_preset(3);
    auto back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(run_id(back) == run_id(c));
    CHECK(run_id(c).size() == 16);
    CHECK_THROWS_AS(config_from_json({{"colour", "red"}}), ValidationError);
    CHECK_THROWS_AS(figure_preset(5), ValidationError);
}

TEST_CASE("disjoint seeds give independent paths", "[harness]") {
    auto a = testing::diffs(generate(process::BM{}, 10000, 10000.0, Seed{1}).values);
    auto b = testing::diffs(generate(process::BM{}, 10000, 10000.0, Seed{2}).values);
    const double ma = testing::mean_of(a), mb = testing::mean_of(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    CHECK(std::abs(sab / std::sqrt(saa * sbb)) < 0.05);

    auto cfg = small_bm();
    cfg.seeds = {1, 2, 3};
    auto r = compute_experiment(cfg);
    REQUIRE(r.modified);
    CHECK(r.modified->per_seed[0].tau != r.modified->per_seed[1].tau);
}

TEST_CASE("figure 1 reproduction", "[harness][figure]") {
    auto root = testing::fresh_dir("harness_fig1");
    auto rec = reproduce_figure(1, root / "f1", root);
    REQUIRE(rec.status == "ok");
    CHECK(contains(rec.manifest, "figure1.svg"));
    auto r = compute_experiment(figure_preset(1));
    auto peak = spectrum_peak(r.modified->spectrum);
    REQUIRE(peak);
    CHECK_THAT(peak->first, WithinAbs(0.5, 0.05));
}

TEST_CASE("figure 2 reproduction", "[harness][figure]") {
    auto r = compute_experiment(figure_preset(2));
    const double dev = max_deviation(*r.modified, r.qs.values(), theoretical_tau(tau_model::StableAsym{1.0}), -2.0, 4.0);
    INFO("max |tau~ - tau_inf| on [-2, 4] = " << dev);
    CHECK(dev <= 0.15);
}

TEST_CASE("figure 4 reproduction", "[harness][figure]") {
    auto r = compute_experiment(figure_preset(4));
    const double dev = max_deviation(*r.modified, r.qs.values(), theoretical_tau(tau_model::Mrw{0.025}), -3.0, 3.0);
    INFO("max |tau~ - tau| on [-3, 3] = " << dev);
    CHECK(dev <= 0.15);
}
