// mlnec: compile, ground, infer, learn and evaluate Event Calculus MLNs.

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "mlnec/compiler.hpp"
#include "mlnec/error.hpp"
#include "mlnec/inference.hpp"
#include "mlnec/kb.hpp"
#include "mlnec/learning.hpp"
#include "mlnec/narrative.hpp"
#include "mlnec/network.hpp"
#include "mlnec/recognition.hpp"

using namespace mlnec;

namespace {

struct KbOptions {
  std::string path;
  std::string policy;
  double default_weight = 1.0;
  bool hard_sigma = false;
};

void add_kb_options(CLI::App* cmd, KbOptions& o, bool positional) {
  if (positional)
    cmd->add_option("kb", o.path, "Knowledge base (.mlnec), source or compiled")->required();
  else
    cmd->add_option("--kb", o.path, "Knowledge base (.mlnec); defaults to the bundled meeting/moving KB");
  cmd->add_option("--policy", o.policy, "Inertia policy: HI, SI_h, SI_negh, SI, SI_eq");
  cmd->add_option("--default-weight", o.default_weight, "Weight of soft formulas without one");
  cmd->add_flag("--hard-sigma", o.hard_sigma, "Keep effect rules hard");
}

KnowledgeBaseSource read_kb(const KbOptions& o) {
  return o.path.empty() ? parse_kb(bundled_kb_text()) : load_kb(o.path);
}

CompiledKB compiled_kb(const KbOptions& o) {
  std::optional<InertiaPolicy> policy;
  if (!o.policy.empty()) {
    auto v = variant_from_name(o.policy);
    if (!v) throw Error("unknown inertia policy " + o.policy);
    policy = InertiaPolicy{*v, {}};
  }
  return load_compiled(read_kb(o), policy, !o.hard_sigma, o.default_weight);
}

Narrative read_narrative(const std::string& path, const Signature& sig, const std::string& annotation = {}) {
  Narrative n = load_narrative(path, sig);
  if (!annotation.empty()) with_file(annotation, [&] { parse_annotation(read_file(annotation), sig, n); });
  return n;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_file(out_path, text);
}

struct InferOptions {
  std::string mode = "marginal";
  std::string engine = "auto";
  std::size_t samples = 1000;
  std::size_t burn_in = 100;
  int chains = 1;
  std::size_t flips = 10000;
  std::size_t restarts = 10;
  double threshold = 0.5;
};

void add_infer_options(CLI::App* cmd, InferOptions& o) {
  cmd->add_option("--mode", o.mode, "marginal or map")->check(CLI::IsMember({"marginal", "map"}));
  cmd->add_option("--engine", o.engine, "auto, exact, elimination, mcsat, bnb, localsearch");
  cmd->add_option("--samples", o.samples, "MC-SAT samples");
  cmd->add_option("--burn-in", o.burn_in, "MC-SAT burn-in per chain");
  cmd->add_option("--chains", o.chains, "MC-SAT chains");
  cmd->add_option("--flips", o.flips, "Local search flips per restart");
  cmd->add_option("--restarts", o.restarts, "Local search restarts");
}

RecognizeOptions recognize_options(const InferOptions& o, std::uint64_t seed) {
  RecognizeOptions r;
  r.mode = o.mode == "map" ? RecognitionMode::Map : RecognitionMode::Marginal;
  auto e = engine_from_name(o.engine);
  if (!e) throw Error("unknown engine " + o.engine);
  r.engine = *e;
  r.threshold = o.threshold;
  r.mcsat.samples = o.samples;
  r.mcsat.burn_in = o.burn_in;
  r.mcsat.chains = o.chains;
  r.mcsat.seed = seed;
  r.localsearch.flips = o.flips;
  r.localsearch.restarts = o.restarts;
  r.localsearch.seed = seed;
  return r;
}

std::string recognition_csv(const Recognition& r) {
  std::vector<std::size_t> order(r.atoms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (r.atoms[a].fluent != r.atoms[b].fluent) return r.atoms[a].fluent < r.atoms[b].fluent;
    return r.atoms[a].time < r.atoms[b].time;
  });
  std::string out = "time,fluent,probability,recognised\n";
  char buf[64];
  for (std::size_t i : order) {
    std::snprintf(buf, sizeof buf, "%.4f", r.probability[i]);
    out += std::to_string(r.atoms[i].time) + "," + r.atoms[i].fluent + "," + buf + "," +
           (r.recognised[i] ? "true" : "false") + "\n";
  }
  return out;
}

Narrative read_annotation_file(const std::string& path, const Signature& sig) {
  std::filesystem::path p(path);
  if (p.extension() == ".ann") {
    Narrative n;
    with_file(path, [&] { parse_annotation(read_file(path), sig, n); });
    return n;
  }
  return load_narrative(path, sig);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event Calculus knowledge bases as Markov logic networks"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  int threads = 0;
  std::string format = "csv";
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv"}));

  // compile
  auto* c_compile = app.add_subcommand("compile", "Complete and specialise a KB, print the compiled formulas");
  KbOptions compile_kb;
  std::string compile_out;
  add_kb_options(c_compile, compile_kb, true);
  c_compile->add_option("-o,--output", compile_out, "Output path");

  // ground
  auto* c_ground = app.add_subcommand("ground", "Ground a KB over a narrative");
  KbOptions ground_kb;
  std::string ground_narr, ground_out;
  bool ground_stats = false, ground_dump = false, ground_raw = false;
  add_kb_options(c_ground, ground_kb, true);
  c_ground->add_option("narrative", ground_narr, "Narrative (.evid)")->required();
  c_ground->add_flag("--stats", ground_stats, "Print clause and atom counts");
  c_ground->add_flag("--dump", ground_dump, "Print the ground network");
  c_ground->add_flag("--no-simplify", ground_raw, "Keep evidence atoms as clamped variables");
  c_ground->add_option("-o,--output", ground_out, "Output path");

  // infer
  auto* c_infer = app.add_subcommand("infer", "Marginal or MAP inference");
  KbOptions infer_kb;
  InferOptions infer_opt;
  std::string infer_narr, infer_out;
  add_kb_options(c_infer, infer_kb, true);
  c_infer->add_option("narrative", infer_narr, "Narrative (.evid)")->required();
  add_infer_options(c_infer, infer_opt);
  c_infer->add_option("-o,--output", infer_out, "Output path");

  // learn
  auto* c_learn = app.add_subcommand("learn", "Learn soft weights from annotated narratives");
  KbOptions learn_kb;
  std::string learn_manifest, learn_method = "dn", learn_out;
  int learn_epochs = 20, learn_fold = -1;
  double learn_lambda = 1.0, learn_rate = 1.0;
  std::optional<double> learn_init;
  std::size_t learn_samples = 1000;
  add_kb_options(c_learn, learn_kb, true);
  c_learn->add_option("manifest", learn_manifest, "Manifest: narrative [annotation] [fold=N] per line")->required();
  c_learn->add_option("--method", learn_method, "dn or perceptron")->check(CLI::IsMember({"dn", "perceptron"}));
  c_learn->add_option("--epochs", learn_epochs, "Training epochs");
  c_learn->add_option("--lambda", learn_lambda, "Diagonal Newton damping");
  c_learn->add_option("--rate", learn_rate, "Perceptron learning rate");
  c_learn->add_option("--init-weight", learn_init, "Initial weight of every soft slot");
  c_learn->add_option("--samples", learn_samples, "MC-SAT samples per instance when exact inference is too large");
  c_learn->add_option("--holdout-fold", learn_fold, "Leave out manifest entries of this fold");
  c_learn->add_option("-o,--output", learn_out, "Output path for the learned KB");

  // recognize
  auto* c_rec = app.add_subcommand("recognize", "Recognise composite events over a narrative");
  KbOptions rec_kb;
  InferOptions rec_opt;
  std::string rec_narr, rec_out;
  add_kb_options(c_rec, rec_kb, true);
  c_rec->add_option("narrative", rec_narr, "Narrative (.evid)")->required();
  add_infer_options(c_rec, rec_opt);
  c_rec->add_option("--threshold", rec_opt.threshold, "Recognition threshold on marginals");
  c_rec->add_option("-o,--output", rec_out, "Output path");

  // evaluate
  auto* c_eval = app.add_subcommand("evaluate", "Score results against an annotation");
  KbOptions eval_kb;
  std::string eval_results, eval_ann;
  double eval_threshold = 0.5;
  bool eval_sweep = false;
  c_eval->add_option("results", eval_results, "Results CSV from infer or recognize")->required();
  c_eval->add_option("annotation", eval_ann, "Annotation (.ann, or .evid with holdsAt lines)")->required();
  c_eval->add_option("--kb", eval_kb.path, "KB providing the signature");
  c_eval->add_option("--threshold", eval_threshold, "Recognition threshold");
  c_eval->add_flag("--sweep", eval_sweep, "Metrics at 101 thresholds on [0,1]");

  // ablate
  auto* c_ablate = app.add_subcommand("ablate", "Erase evidence on random intervals");
  KbOptions ablate_kb;
  std::string ablate_narr, ablate_dir = ".";
  AblationSpec ablate_spec;
  c_ablate->add_option("narrative", ablate_narr, "Narrative (.evid)")->required();
  c_ablate->add_option("--kb", ablate_kb.path, "KB providing the signature");
  c_ablate->add_option("--probability", ablate_spec.start_probability, "Interval start probability");
  c_ablate->add_option("--lengths", ablate_spec.lengths, "Interval lengths");
  c_ablate->add_option("--repetitions", ablate_spec.repetitions, "Repetitions");
  c_ablate->add_option("--min-entities", ablate_spec.min_entities, "Entities with SDEs required at a start");
  c_ablate->add_option("--out-dir", ablate_dir, "Directory for degraded narratives");

  // simulate
  auto* c_sim = app.add_subcommand("simulate", "Generate a synthetic narrative");
  KbOptions sim_kb;
  std::string sim_preset, sim_scenario, sim_out, sim_ann_out;
  c_sim->add_option("--kb", sim_kb.path, "KB providing the signature and rules");
  auto* preset_opt = c_sim->add_option("--preset", sim_preset, "fig1, inertia-decay or random-walkers");
  c_sim->add_option("--scenario", sim_scenario, "Scenario JSON file")->excludes(preset_opt);
  c_sim->add_option("-o,--output", sim_out, "Narrative output path");
  c_sim->add_option("--annotation-out", sim_ann_out, "Write holdsAt annotation lines to this file instead");

  // inertia-lab
  auto* c_lab = app.add_subcommand("inertia-lab", "Marginal series of one fluent under an inertia policy");
  KbOptions lab_kb;
  std::string lab_preset = "inertia-decay", lab_scenario, lab_fluent = "meeting(id1,id2)", lab_initial, lab_out;
  std::string lab_engine = "auto";
  double lab_weight = 1.0, lab_sigma = 1.0;
  int lab_horizon = -1;
  c_lab->add_option("--kb", lab_kb.path, "KB (source)");
  c_lab->add_option("--policy", lab_kb.policy, "Inertia policy")->default_val("SI_eq");
  c_lab->add_option("--weight", lab_weight, "Weight of the soft inertia formulas");
  c_lab->add_option("--sigma-weight", lab_sigma, "Weight of the effect formulas");
  c_lab->add_option("--preset", lab_preset, "Scenario preset");
  c_lab->add_option("--scenario", lab_scenario, "Scenario JSON file");
  c_lab->add_option("--fluent", lab_fluent, "Fluent instance to report");
  c_lab->add_option("--initial", lab_initial, "Initial value of the fluent: true or false")
      ->check(CLI::IsMember({"true", "false"}));
  c_lab->add_option("--horizon", lab_horizon, "Override the scenario horizon");
  c_lab->add_option("--engine", lab_engine, "auto, exact, elimination, mcsat");
  c_lab->add_option("-o,--output", lab_out, "Output path");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (c_compile->parsed()) {
      emit(compile_out, serialize_compiled(compiled_kb(compile_kb)));
    } else if (c_ground->parsed()) {
      CompiledKB ckb = compiled_kb(ground_kb);
      Narrative n = read_narrative(ground_narr, ckb.signature);
      GroundOptions go;
      go.simplify = !ground_raw;
      GroundNetwork gn = ground(ckb, n, go);
      std::string text;
      if (ground_stats || !ground_dump) text += format_stats(network_stats(gn));
      if (ground_dump) text += dump_network(gn);
      emit(ground_out, text);
    } else if (c_infer->parsed()) {
      CompiledKB ckb = compiled_kb(infer_kb);
      Narrative n = read_narrative(infer_narr, ckb.signature);
      GroundNetwork gn = ground(ckb, n);
      RecognizeOptions ro = recognize_options(infer_opt, seed);
      if (ro.mode == RecognitionMode::Map) {
        MapAssignment m = infer_map(gn, ro);
        if (m.best_effort) std::cerr << "warning: no assignment satisfying every HARD clause was found\n";
        emit(infer_out, serialize_results(m));
      } else {
        emit(infer_out, serialize_results(infer_marginals(gn, ro)));
      }
    } else if (c_learn->parsed()) {
      CompiledKB ckb = compiled_kb(learn_kb);
      std::vector<TrainingInstance> instances;
      for (const auto& e : load_manifest(learn_manifest)) {
        if (learn_fold >= 0 && e.fold == learn_fold) continue;
        Narrative n = read_narrative(e.narrative, ckb.signature, e.annotation);
        instances.push_back(make_instance(ground(ckb, n), n, e.narrative));
      }
      if (instances.empty()) throw Error("no training narratives selected from " + learn_manifest);
      LearnOptions lo;
      lo.lambda = learn_lambda;
      lo.learning_rate = learn_rate;
      lo.mcsat.samples = learn_samples;
      lo.mcsat.seed = seed;
      lo.localsearch.seed = seed;
      std::vector<double> w = ckb.weights;
      if (learn_init) std::fill(w.begin(), w.end(), *learn_init);
      if (learn_method == "dn") {
        for (int ep = 0; ep < learn_epochs; ++ep) {
          EpochReport r = diagonal_newton_epoch(instances, w, lo);
          w = r.weights;
          std::fprintf(stderr, "epoch %d step %.4g", ep + 1, r.step);
          if (r.neg_cll_after) std::fprintf(stderr, " neg_cll %.6f", *r.neg_cll_after);
          std::fprintf(stderr, "\n");
        }
      } else {
        PerceptronState st(w);
        for (int ep = 0; ep < learn_epochs; ++ep) w = perceptron_epoch(instances, st, lo);
      }
      ckb.set_weights(w);
      emit(learn_out, serialize_compiled(ckb));
    } else if (c_rec->parsed()) {
      CompiledKB ckb = compiled_kb(rec_kb);
      Narrative n = read_narrative(rec_narr, ckb.signature);
      Recognition r = recognize(ckb, n, recognize_options(rec_opt, seed));
      if (r.best_effort) std::cerr << "warning: no assignment satisfying every HARD clause was found\n";
      emit(rec_out, recognition_csv(r));
    } else if (c_eval->parsed()) {
      KnowledgeBaseSource kb = read_kb(eval_kb);
      Recognition r = with_file(eval_results, [&] { return recognition_from_results(read_file(eval_results), eval_threshold); });
      Narrative ann = read_annotation_file(eval_ann, kb.signature);
      if (eval_sweep) {
        emit("", format_metrics_csv(threshold_sweep(r.probability, labels_for(r, ann))));
      } else {
        emit("", format_metrics_csv({metrics(r, ann, eval_threshold)}));
      }
    } else if (c_ablate->parsed()) {
      KnowledgeBaseSource kb = read_kb(ablate_kb);
      Narrative n = load_narrative(ablate_narr, kb.signature);
      ablate_spec.seed = seed;
      std::filesystem::create_directories(ablate_dir);
      std::string stem = std::filesystem::path(ablate_narr).stem().string();
      std::string table = "repetition,length,starts,erased,path\n";
      for (const auto& a : ablate(n, ablate_spec)) {
        std::string path = (std::filesystem::path(ablate_dir) / (stem + "_r" + std::to_string(a.repetition) + "_L" +
                                                                  std::to_string(a.length) + ".evid"))
                               .string();
        write_file(path, serialize_narrative(a.narrative));
        table += std::to_string(a.repetition) + "," + std::to_string(a.length) + "," +
                 std::to_string(a.starts.size()) + "," + std::to_string(a.erased) + "," + path + "\n";
      }
      emit("", table);
    } else if (c_sim->parsed()) {
      KnowledgeBaseSource kb = read_kb(sim_kb);
      std::string spec = !sim_scenario.empty() ? read_file(sim_scenario)
                                               : preset_scenario(sim_preset.empty() ? "random-walkers" : sim_preset);
      std::optional<std::uint64_t> s;
      if (seed_opt->count()) s = seed;
      Narrative n = simulate(spec, kb, s);
      if (!sim_ann_out.empty()) {
        Narrative ann;
        ann.set_horizon(n.horizon(), n.explicit_horizon());
        for (const auto& f : n.annotation()) ann.add_annotation(f.atom, f.truth, f.time);
        std::string text;
        for (const auto& f : ann.annotation()) text += (f.truth ? "" : "!") + f.key + "\n";
        write_file(sim_ann_out, text);
        n.clear_annotation();
      }
      emit(sim_out, serialize_narrative(n));
    } else if (c_lab->parsed()) {
      KnowledgeBaseSource kb = read_kb(lab_kb);
      nlohmann::json spec =
          nlohmann::json::parse(!lab_scenario.empty() ? read_file(lab_scenario) : preset_scenario(lab_preset));
      if (lab_horizon >= 0) spec["horizon"] = lab_horizon;
      if (lab_initial == "true") spec["initially"] = std::vector<std::string>{lab_fluent};
      if (lab_initial == "false") spec["initially"] = std::vector<std::string>{};
      std::optional<std::uint64_t> s;
      if (seed_opt->count()) s = seed;
      Narrative n = simulate(spec.dump(), kb, s);
      CompiledKB ckb = compiled_kb(lab_kb);
      set_inertia_weight(ckb, lab_weight);
      set_effect_weight(ckb, lab_sigma);
      InferOptions io;
      io.engine = lab_engine;
      emit(lab_out, format_series(fluent_series(ckb, n, lab_fluent, recognize_options(io, seed))));
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
