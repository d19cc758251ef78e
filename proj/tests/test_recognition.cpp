#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mlnec/error.hpp"
#include "mlnec/recognition.hpp"
#include "support.hpp"

using namespace mlnec;
namespace fs = std::filesystem;

namespace {

KnowledgeBaseSource bundled() { return parse_kb(bundled_kb_text()); }

/// Independent average-precision oracle: for every distinct score s taken
/// as a threshold, recompute precision and recall from scratch.
double sweep_oracle(const std::vector<double>& score, const std::vector<bool>& label) {
  std::vector<double> th(score);
  std::sort(th.begin(), th.end(), std::greater<>());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  double positives = static_cast<double>(std::count(label.begin(), label.end(), true));
  double area = 0.0, last_recall = 0.0;
  for (double t : th) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < score.size(); ++i)
      if (score[i] >= t) (label[i] ? tp : fp) += 1;
    double r = tp / positives, p = tp / (tp + fp);
    area += (r - last_recall) * p;
    last_recall = r;
  }
  return area;
}

std::vector<double> meeting_series(const Recognition& r, const std::string& fluent = "meeting(id1,id2)") {
  std::vector<double> out(static_cast<std::size_t>(r.horizon) + 1, -1.0);
  for (std::size_t i = 0; i < r.atoms.size(); ++i)
    if (r.atoms[i].fluent == fluent) out[r.atoms[i].time] = r.probability[i];
  return out;
}

int run(const std::string& cmd) { return std::system(cmd.c_str()); }

}  // namespace

TEST_CASE("metric regression against the published tables") {
  auto moving = metrics_from_counts(4008, 400, 2264);
  CHECK(std::abs(moving.precision - 0.9093) <= 1e-4);
  CHECK(std::abs(moving.recall - 0.6390) <= 1e-4);
  CHECK(std::abs(moving.f1 - 0.7506) <= 1e-4);
  auto meeting = metrics_from_counts(3099, 1413, 523);
  CHECK(std::abs(meeting.precision - 0.6868) <= 1e-4);
  CHECK(std::abs(meeting.recall - 0.8556) <= 1e-4);
  CHECK(std::abs(meeting.f1 - 0.7620) <= 1e-4);
  auto zero = metrics_from_counts(0, 0, 0);
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.f1 == 0.0);
}

TEST_CASE("metric identities over random count triples") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> d(0, 5000);
  for (int k = 0; k < 10000; ++k) {
    std::size_t tp = d(rng), fp = d(rng), fn = d(rng);
    auto m = metrics_from_counts(tp, fp, fn);
    if (tp + fp) CHECK(m.precision * static_cast<double>(tp + fp) == doctest::Approx(static_cast<double>(tp)));
    if (tp + fn) CHECK(m.recall * static_cast<double>(tp + fn) == doctest::Approx(static_cast<double>(tp)));
    if (tp) CHECK(m.f1 == doctest::Approx(2.0 * tp / (2.0 * tp + fp + fn)));
    CHECK(m.f1 >= 0.0);
    CHECK(m.f1 <= 1.0);
  }
}

TEST_CASE("micro aggregation adds counts") {
  auto a = metrics_from_counts(10, 5, 2);
  a += metrics_from_counts(4, 1, 6);
  CHECK(a.tp == 14);
  CHECK(a.fp == 6);
  CHECK(a.fn == 8);
  CHECK(a.f1 == doctest::Approx(28.0 / 42.0));
}

TEST_CASE("AUPRC") {
  CHECK(auprc({0.9, 0.8, 0.3, 0.1}, {true, true, false, false}) == doctest::Approx(1.0));
  CHECK(auprc({0.4, 0.4, 0.4, 0.4, 0.4}, {true, false, false, true, false}) == doctest::Approx(0.4));
  std::vector<double> s{0.9, 0.8, 0.7, 0.6, 0.5, 0.4};
  std::vector<bool> l{true, false, true, true, false, false};
  // Hand trace: recall steps of 1/3 at precisions 1, 2/3 and 3/4.
  CHECK(auprc(s, l) == doctest::Approx((1.0 + 2.0 / 3.0 + 0.75) / 3.0));
  CHECK(auprc(s, l) == doctest::Approx(sweep_oracle(s, l)));
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<int> q(0, 10);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> sc(20);
    std::vector<bool> lb(20);
    for (std::size_t i = 0; i < sc.size(); ++i) {
      sc[i] = q(rng) / 10.0;
      lb[i] = q(rng) < 4;
    }
    lb[0] = true;
    CHECK(auprc(sc, lb) == doctest::Approx(sweep_oracle(sc, lb)));
  }
  CHECK_THROWS_AS(auprc({0.2, 0.3}, {false, false}), Error);
}

TEST_CASE("threshold sweep") {
  auto rows = threshold_sweep({0.2, 0.6, 0.9}, {false, true, true});
  REQUIRE(rows.size() == 101);
  CHECK(rows.front().threshold == 0.0);
  CHECK(rows.back().threshold == 1.0);
  CHECK(rows.front().recall == 1.0);
  CHECK(rows[50].tp == 2);
  CHECK(rows[50].fp == 0);
  std::string csv = format_metrics_csv(rows);
  CHECK(csv.rfind("threshold,tp,fp,fn,tn,precision,recall,f1,auprc\n", 0) == 0);
}

TEST_CASE("fig1 scenario under hard inertia") {
  auto kb = bundled();
  auto ckb = compile(kb, {InertiaVariant::HI, {}});
  Narrative n = simulate(preset_scenario("fig1"), kb);
  RecognizeOptions o;
  auto r = recognize(ckb, n, o);
  auto p = meeting_series(r);
  for (int t = 0; t <= 3; ++t) CHECK(p[t] < 0.5);
  for (int t = 4; t <= 30; ++t) CHECK(p[t] >= 0.0);
  CHECK(p[4] >= 0.5);
  // Recognised on an interval starting at 4.
  std::vector<bool> rec;
  for (std::size_t i = 0; i < r.atoms.size(); ++i)
    if (r.atoms[i].fluent == "meeting(id1,id2)") rec.push_back(r.recognised[i]);
  CHECK_FALSE(rec[3]);
  CHECK(rec[4]);
  for (int t = 4; t <= 20; ++t) CHECK(rec[t]);
  for (int t = 21; t <= 30; ++t) CHECK_FALSE(rec[t]);

  o.threshold = 0.0;
  auto all = recognize(ckb, n, o);
  CHECK(std::all_of(all.recognised.begin(), all.recognised.end(), [](bool b) { return b; }));
  o.threshold = 1.0 + 1e-9;
  auto none = recognize(ckb, n, o);
  CHECK(std::none_of(none.recognised.begin(), none.recognised.end(), [](bool b) { return b; }));
}

TEST_CASE("at threshold one only hard-forced atoms are recognised") {
  auto kb = bundled();
  auto ckb = compile(kb, {InertiaVariant::HI, {}});
  Narrative n = simulate(preset_scenario("inertia-decay"), kb);
  RecognizeOptions o;
  o.threshold = 1.0;
  auto r = recognize(ckb, n, o);
  for (std::size_t i = 0; i < r.atoms.size(); ++i) CHECK(r.recognised[i] == (r.atoms[i].fluent == "meeting(id1,id2)"));
}

TEST_CASE("MAP recognition") {
  auto kb = bundled();
  auto ckb = compile(kb, {InertiaVariant::HI, {}});
  Narrative n = simulate(preset_scenario("fig1"), kb);
  RecognizeOptions o;
  o.mode = RecognitionMode::Map;
  auto r = recognize(ckb, n, o);
  auto m = metrics(r, n);
  CHECK(m.f1 == 1.0);
  CHECK_FALSE(r.best_effort);
}

TEST_CASE("metrics check the annotation against the recognised atoms") {
  auto kb = bundled();
  auto ckb = compile(kb, {InertiaVariant::HI, {}});
  Narrative n = simulate(preset_scenario("fig1"), kb);
  auto r = recognize(ckb, n);
  auto m = metrics(r, n);
  CHECK(m.tp == 17);
  CHECK(m.fn == 0);
  Narrative shorter = parse_narrative("horizon 10\n", kb.signature);
  CHECK_THROWS_AS(metrics(r, shorter), Error);
  CHECK_THROWS_AS(recognize(ckb, parse_narrative("horizon 5\nhappens(walking(id1),2)\nhappens(exit(id1),2)\n", kb.signature),
                            [] {
                              RecognizeOptions x;
                              x.engine = Engine::BranchAndBound;
                              return x;
                            }()),
                  Error);
}

TEST_CASE("ablation") {
  auto kb = bundled();
  Narrative n = simulate(R"({"horizon": 200, "fix_initial": true, "annotation": true, "walkers": {}})", kb, 17);
  AblationSpec none;
  none.start_probability = 0.0;
  for (const auto& a : ablate(n, none)) {
    CHECK(a.erased == 0);
    CHECK(serialize_narrative(a.narrative) == serialize_narrative(n));
  }

  AblationSpec all;
  all.start_probability = 1.0;
  all.lengths = {n.horizon() + 1};
  all.repetitions = 1;
  auto eligible = eligible_timepoints(n, 2);
  REQUIRE_FALSE(eligible.empty());
  for (const auto& a : ablate(n, all)) {
    for (const auto& f : a.narrative.evidence()) CHECK(f.time < eligible.front());
    CHECK(a.narrative.annotation().size() == n.annotation().size());
    CHECK(a.narrative.fixed().size() == n.fixed().size());
  }

  AblationSpec spec;
  auto first = ablate(n, spec);
  auto second = ablate(n, spec);
  REQUIRE(first.size() == 10);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].starts == second[i].starts);
    CHECK(serialize_narrative(first[i].narrative) == serialize_narrative(second[i].narrative));
    CHECK(first[i].narrative.annotation().size() == n.annotation().size());
    for (int s : first[i].starts) CHECK(std::find(eligible.begin(), eligible.end(), s) != eligible.end());
  }
  // Longer intervals extend the same starts.
  CHECK(first[0].starts == first[1].starts);
  CHECK(first[0].erased <= first[1].erased);
}

TEST_CASE("ablation start counts follow the binomial law") {
  auto kb = bundled();
  std::string text = "horizon 999\n";
  for (int t = 0; t <= 999; ++t)
    text += "happens(walking(id1)," + std::to_string(t) + ")\nhappens(active(id2)," + std::to_string(t) + ")\n";
  Narrative n = parse_narrative(text, kb.signature);
  const double trials = 1000.0, p = 0.01;
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    AblationSpec s;
    s.lengths = {10};
    s.repetitions = 1;
    s.seed = seed;
    auto a = ablate(n, s);
    total += static_cast<double>(a[0].starts.size());
  }
  double mean = total / 100.0;
  double sigma_mean = std::sqrt(trials * p * (1 - p) / 100.0);
  CHECK(std::abs(mean - trials * p) <= 3 * sigma_mean);
}

TEST_CASE("simulation") {
  auto kb = bundled();
  Narrative fig = simulate(preset_scenario("fig1"), kb);
  CHECK(fig.horizon() == 30);
  CHECK(fig.evidence_true("happens(active(id1),3)"));
  CHECK(fig.evidence_true("happens(inactive(id1),10)"));
  CHECK(fig.evidence_true("happens(walking(id1),20)"));
  for (int t = 0; t <= 30; ++t)
    CHECK(fig.annotated("holdsAt(meeting(id1,id2)," + std::to_string(t) + ")") == (t >= 4 && t <= 20));

  Narrative empty = simulate("{}", kb);
  CHECK(empty.horizon() == 0);
  CHECK(empty.evidence().empty());
  CHECK_FALSE(empty.has_annotation());

  auto a = serialize_narrative(simulate(preset_scenario("random-walkers"), kb, 5));
  auto b = serialize_narrative(simulate(preset_scenario("random-walkers"), kb, 5));
  auto c = serialize_narrative(simulate(preset_scenario("random-walkers"), kb, 6));
  CHECK(a == b);
  CHECK(a != c);

  Narrative scripted = simulate(R"json({"horizon": 6, "script": [{"from": 2, "to": 4, "atoms": ["happens(walking(id2),T)"]}]})json", kb);
  CHECK(scripted.evidence().size() == 3);
  CHECK(scripted.evidence_true("happens(walking(id2),4)"));

  CHECK_THROWS_AS(simulate("{\"horizon\": ", kb), Error);
  CHECK_THROWS_AS(simulate(R"json({"initially": ["dancing(id1,id2)"]})json", kb), Error);
  CHECK_THROWS_AS(preset_scenario("nope"), Error);
}

TEST_CASE("crisp annotation lets termination win") {
  auto kb = bundled();
  Narrative n = parse_narrative(
      "horizon 3\nhappens(active(id1),0)\nclose(id1,id2,25,0)\nhappens(running(id1),0)\n", kb.signature);
  annotate_crisp(complete(kb), n);
  CHECK_FALSE(n.annotated("holdsAt(meeting(id1,id2),1)"));
}

TEST_CASE("manifests") {
  auto m = parse_manifest("# training\na.evid a.ann fold=2\n\nb.evid\n/abs/c.evid fold=0  # comment\n", "/data");
  REQUIRE(m.size() == 3);
  CHECK(m[0].narrative == "/data/a.evid");
  CHECK(m[0].annotation == "/data/a.ann");
  CHECK(m[0].fold == 2);
  CHECK(m[1].annotation.empty());
  CHECK(m[1].fold == -1);
  CHECK(m[2].narrative == "/abs/c.evid");
  CHECK_THROWS_AS(parse_manifest("a b c\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest("a fold=x\n"), ParseError);
}

TEST_CASE("end-to-end results are byte-identical for identical seeds") {
  auto kb = bundled();
  auto ckb = compile(kb, {InertiaVariant::SI_h, {}});
  Narrative n = simulate(preset_scenario("random-walkers"), kb, 3);
  GroundNetwork gn = ground(ckb, n);
  McSatOptions o;
  o.samples = 300;
  o.chains = 3;
  o.seed = 7;
  auto a = serialize_results(mcsat_marginals(gn, o));
  auto b = serialize_results(mcsat_marginals(ground(ckb, n), o));
  CHECK(a == b);
}

TEST_CASE("recognition from a results file") {
  auto r = recognition_from_results("time,fluent,probability\n0,meeting(id1,id2),0.2500\n1,meeting(id1,id2),0.7500\n", 0.5);
  CHECK(r.horizon == 1);
  CHECK(r.recognised == std::vector<bool>{false, true});
}

TEST_CASE("command line round trip") {
  fs::path dir = fs::temp_directory_path() / "mlnec_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = MLNEC_CLI;
  const std::string kb = support::source_path("data/meeting_moving.mlnec");
  const std::string d = dir.string();
  CHECK(run(cli + " simulate --preset fig1 -o " + d + "/fig1.evid --annotation-out " + d + "/fig1.ann") == 0);
  CHECK(run(cli + " compile " + kb + " --policy SI_h -o " + d + "/c.mlnec") == 0);
  CHECK(run(cli + " ground " + kb + " " + d + "/fig1.evid --stats -o " + d + "/stats.txt") == 0);
  CHECK(run(cli + " recognize " + kb + " " + d + "/fig1.evid --policy HI -o " + d + "/rec.csv") == 0);
  CHECK(run(cli + " infer " + kb + " " + d + "/fig1.evid --policy HI -o " + d + "/marg.csv") == 0);
  CHECK(run(cli + " evaluate " + d + "/rec.csv " + d + "/fig1.ann --kb " + kb + " > " + d + "/rec_metrics.csv") == 0);
  CHECK(run(cli + " evaluate " + d + "/marg.csv " + d + "/fig1.ann --kb " + kb + " > " + d + "/metrics.csv") == 0);
  CHECK(run(cli + " ablate " + d + "/fig1.evid --kb " + kb + " --out-dir " + d + "/abl > " + d + "/abl.csv") == 0);
  CHECK(run(cli + " inertia-lab --policy SI_eq --weight 1 --horizon 19 -o " + d + "/lab.csv") == 0);
  {
    std::ofstream man(dir / "train.txt");
    man << "fig1.evid fig1.ann\n";
  }
  CHECK(run(cli + " learn " + kb + " " + d + "/train.txt --policy HI --epochs 2 -o " + d + "/learned.mlnec 2>/dev/null") == 0);
  CHECK(run(cli + " learn " + kb + " " + d + "/train.txt --policy HI --method perceptron --epochs 2 -o " + d +
            "/learned_p.mlnec 2>/dev/null") == 0);
  CHECK(run(cli + " infer " + d + "/learned.mlnec " + d + "/fig1.evid -o " + d + "/learned.csv") == 0);

  std::string metrics_csv = read_file(d + "/metrics.csv");
  CHECK(metrics_csv.rfind("threshold,tp,fp,fn,tn,precision,recall,f1,auprc\n", 0) == 0);
  CHECK(metrics_csv.find("0.50,17,0,0,") != std::string::npos);
  CHECK(read_file(d + "/rec_metrics.csv") == metrics_csv);
  std::string marg = read_file(d + "/marg.csv");
  CHECK(marg.find("4,meeting(id1,id2),0.6817") != std::string::npos);
  CHECK(read_file(d + "/lab.csv").rfind("time,probability\n0,1.000000\n", 0) == 0);
  CHECK(fs::exists(dir / "learned.mlnec"));

  CHECK(run(cli + " compile " + d + "/missing.mlnec 2>/dev/null") != 0);
  {
    std::ofstream bad(dir / "bad.mlnec");
    bad << "sort person = {a}\nevent walking(person))\n";
  }
  int status = run(cli + " compile " + d + "/bad.mlnec 2>/dev/null");
  CHECK(WEXITSTATUS(status) == 2);
  fs::remove_all(dir);
}
