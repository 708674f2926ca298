// netinfer: generate unobserved networks, synthesize observed groups,
// infer networks back, and run the factorial accuracy experiment.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "netinfer/errors.hpp"
#include "netinfer/experiment.hpp"
#include "netinfer/generators.hpp"
#include "netinfer/groups.hpp"
#include "netinfer/metrics.hpp"
#include "netinfer/projection.hpp"
#include "netinfer/sdsm.hpp"

namespace {

using namespace netinfer;

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ValidationError("cannot open file for writing: " + out_path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void echo_config(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ostringstream out;
  out << "config:";
  for (const auto& [k, v] : kv) out << ' ' << k << '=' << v;
  std::cerr << out.str() << "\n";
}

struct GeneratorFlags {
  std::string model;
  int n = 50;
  double edge_prob = 0.08;
  int k = 4;
  double beta = 0.05;
  int m = 2;
  int cliques = 10;
  int size = 5;
  bool connected = false;
  CLI::Option* connected_opt = nullptr;
  int core_n = 10;
  int periph_n = 40;
  double core_density = 0.85;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--model", model, "network model: random|small_world|scale_free|caveman|"
                                      "core_periphery|dolphin|florentine|karate|law|tailor")
        ->required();
    cmd->add_option("--n", n, "node count (random/small_world/scale_free)")
        ->capture_default_str();
    cmd->add_option("--edge-prob", edge_prob, "edge probability (random)")
        ->capture_default_str();
    cmd->add_option("--k", k, "lattice neighbors (small_world)")->capture_default_str();
    cmd->add_option("--beta", beta, "rewire probability (small_world)")->capture_default_str();
    cmd->add_option("--m", m, "edges per step (scale_free)")->capture_default_str();
    cmd->add_option("--cliques", cliques, "clique count (caveman)")->capture_default_str();
    cmd->add_option("--size", size, "clique size (caveman)")->capture_default_str();
    connected_opt = cmd->add_flag("--connected,!--disconnected", connected,
                                  "caveman: relink one edge per cave to its neighbor "
                                  "(default: connected for the catalog caveman)");
    cmd->add_option("--core-n", core_n, "core size (core_periphery)")->capture_default_str();
    cmd->add_option("--periph-n", periph_n, "periphery size (core_periphery)")
        ->capture_default_str();
    cmd->add_option("--core-density", core_density, "core dyad probability (core_periphery)")
        ->capture_default_str();
  }

  NetworkSpec spec() const {
    NetworkSpec s = NetworkSpec::named(model);
    s.n = n;
    s.edge_prob = edge_prob;
    s.lattice_neighbors = k;
    s.rewire_prob = beta;
    s.edges_per_step = m;
    s.n_cliques = cliques;
    s.clique_size = size;
    if (connected_opt != nullptr && connected_opt->count() > 0) s.connected_caves = connected;
    s.core_n = core_n;
    s.periph_n = periph_n;
    s.core_density = core_density;
    s.validate();
    return s;
  }

  std::vector<std::pair<std::string, std::string>> echo() const {
    std::vector<std::pair<std::string, std::string>> kv{{"model", model}};
    const NetworkKind kind = parse_kind(model);
    switch (kind) {
      case NetworkKind::random:
        kv.push_back({"n", std::to_string(n)});
        kv.push_back({"edge_prob", format_double(edge_prob)});
        break;
      case NetworkKind::small_world:
        kv.push_back({"n", std::to_string(n)});
        kv.push_back({"k", std::to_string(k)});
        kv.push_back({"beta", format_double(beta)});
        break;
      case NetworkKind::scale_free:
        kv.push_back({"n", std::to_string(n)});
        kv.push_back({"m", std::to_string(m)});
        break;
      case NetworkKind::caveman: {
        kv.push_back({"cliques", std::to_string(cliques)});
        kv.push_back({"size", std::to_string(size)});
        kv.push_back({"connected", spec().connected_caves ? "true" : "false"});
        break;
      }
      case NetworkKind::core_periphery:
        kv.push_back({"core_n", std::to_string(core_n)});
        kv.push_back({"periph_n", std::to_string(periph_n)});
        kv.push_back({"core_density", format_double(core_density)});
        break;
      default:
        break;
    }
    return kv;
  }
};

struct SdsmFlags {
  double alpha = 0.05;
  std::string tail = "upper";
  std::string pvalues = "auto";
  std::string correction = "none";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "significance level in (0,1)")->capture_default_str();
    cmd->add_option("--tail", tail, "tail rule: upper|two-sided")->capture_default_str();
    cmd->add_option("--pvalues", pvalues, "p-value engine: exact|refined-normal|auto")
        ->capture_default_str();
    cmd->add_option("--correction", correction,
                    "multiple-comparison correction: none|bonferroni|holm")
        ->capture_default_str();
  }

  SdsmConfig config() const {
    SdsmConfig cfg;
    cfg.alpha = alpha;
    if (tail == "upper")
      cfg.tail = TailRule::upper_one_sided;
    else if (tail == "two-sided")
      cfg.tail = TailRule::two_sided_split;
    else
      throw ValidationError("--tail must be upper|two-sided");
    if (pvalues == "exact")
      cfg.pvalue_method = PValueMethod::exact;
    else if (pvalues == "refined-normal")
      cfg.pvalue_method = PValueMethod::refined_normal;
    else if (pvalues == "auto")
      cfg.pvalue_method = PValueMethod::auto_pick;
    else
      throw ValidationError("--pvalues must be exact|refined-normal|auto");
    cfg.correction = parse_correction_token(correction);
    if (cfg.alpha <= 0.0 || cfg.alpha >= 1.0) throw ValidationError("--alpha must lie in (0,1)");
    return cfg;
  }

  static Correction parse_correction_token(const std::string& s) {
    if (s == "none") return Correction::none;
    if (s == "bonferroni") return Correction::bonferroni;
    if (s == "holm") return Correction::holm;
    throw ValidationError("--correction must be none|bonferroni|holm");
  }
};

void print_cell(const CellResult& c) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("undefined");
  };
  std::cout << "cell: network=" << c.network << " multiplier=" << format_double(c.multiplier)
            << " p_clique=" << format_double(c.p_clique) << " method=" << method_token(c.method)
            << "\n";
  std::cout << "reps=" << c.replications_run << " aborted=" << c.aborted
            << " undefined_r=" << c.undefined_r << " undefined_kappa=" << c.undefined_kappa
            << " undefined_jaccard=" << c.undefined_jaccard << "\n";
  std::cout << "mean_r=" << opt(c.mean_r) << " sd_r=" << opt(c.sd_r) << "\n";
  std::cout << "mean_kappa=" << opt(c.mean_kappa) << " sd_kappa=" << opt(c.sd_kappa) << "\n";
  std::cout << "mean_jaccard=" << opt(c.mean_jaccard) << " sd_jaccard=" << opt(c.sd_jaccard)
            << "\n";
  std::cout << "size=" << format_double(c.size) << " density=" << format_double(c.density)
            << " transitivity=" << format_double(c.transitivity)
            << " n_maximal_cliques=" << format_double(c.n_maximal_cliques) << "\n";
  std::cout << "mean_group_size=" << format_double(c.mean_group_size)
            << " mean_memberships=" << format_double(c.mean_memberships)
            << " groups_observed=" << c.groups_observed << "\n";
}

void print_regression(const RegressionSummary& reg, const std::string& title) {
  std::cout << "== regression: " << title << " (" << reg.n_rows << " cells) ==\n";
  std::cout << std::left << std::setw(20) << "predictor" << std::right << std::setw(14) << "B"
            << std::setw(14) << "beta" << "\n";
  for (std::size_t j = 0; j < reg.predictors.size(); ++j) {
    std::ostringstream b, beta;
    b << std::setprecision(6) << reg.coef_b[j];
    beta << std::setprecision(6) << reg.coef_beta[j];
    std::cout << std::left << std::setw(20) << reg.predictors[j] << std::right << std::setw(14)
              << b.str() << std::setw(14) << beta.str() << "\n";
  }
  std::cout << std::left << std::setw(20) << "intercept" << std::right << std::setw(14)
            << format_double(reg.intercept) << "\n";
  std::cout << std::left << std::setw(20) << "R^2" << std::right << std::setw(14)
            << format_double(reg.r_squared) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"network inference from observed groups: generators, group synthesis, "
               "projection/SDSM inference, factorial experiment"};
  app.require_subcommand(1);

  // generate
  auto* cmd_generate = app.add_subcommand("generate", "write an edge list for a network model");
  GeneratorFlags gen_flags;
  gen_flags.add_to(cmd_generate);
  std::uint64_t gen_seed = 1;
  std::string gen_out = "-";
  cmd_generate->add_option("--seed", gen_seed, "random seed")->capture_default_str();
  cmd_generate->add_option("--out", gen_out, "output path ('-' for stdout)")
      ->capture_default_str();

  // groups
  auto* cmd_groups = app.add_subcommand("groups", "synthesize observed groups from a network");
  std::string groups_graph, groups_out = "-";
  std::int64_t groups_count = 0;
  double groups_multiplier = 0.0, groups_p = 1.0;
  int groups_min_clique = 2;
  std::string groups_pool = "nonclique";
  std::uint64_t groups_seed = 1;
  cmd_groups->add_option("--graph", groups_graph, "edge list of the unobserved network")
      ->required();
  auto* groups_count_opt =
      cmd_groups->add_option("--num-groups", groups_count, "number of groups to observe");
  cmd_groups->add_option("--multiplier", groups_multiplier,
                         "groups as a multiple of the node count")
      ->excludes(groups_count_opt);
  cmd_groups->add_option("--p", groups_p, "clique fidelity probability")->capture_default_str();
  cmd_groups->add_option("--min-clique-size", groups_min_clique, "smallest clique to sample")
      ->capture_default_str();
  cmd_groups->add_option("--replacement-pool", groups_pool,
                         "outsider pool: nonclique|all")
      ->capture_default_str();
  cmd_groups->add_option("--seed", groups_seed, "random seed")->capture_default_str();
  cmd_groups->add_option("--out", groups_out, "output membership CSV ('-' for stdout)")
      ->capture_default_str();

  // infer
  auto* cmd_infer = app.add_subcommand("infer", "infer a network from a membership CSV");
  std::string infer_membership, infer_method, infer_out = "-";
  SdsmFlags infer_sdsm;
  cmd_infer->add_option("--membership", infer_membership, "membership CSV (agent,group)")
      ->required();
  cmd_infer->add_option("--method", infer_method, "inference method: projection|sdsm")
      ->required();
  infer_sdsm.add_to(cmd_infer);
  cmd_infer->add_option("--out", infer_out, "output edge list ('-' for stdout)")
      ->capture_default_str();

  // cell
  auto* cmd_cell = app.add_subcommand("cell", "run one experimental condition");
  GeneratorFlags cell_flags;
  cell_flags.add_to(cmd_cell);
  double cell_multiplier = 1.0, cell_p = 1.0;
  std::string cell_method;
  int cell_reps = 200, cell_threads = 0, cell_min_clique = 2;
  std::string cell_pool = "nonclique";
  std::uint64_t cell_seed_opt = 1;
  bool cell_csv = false;
  SdsmFlags cell_sdsm;
  cmd_cell->add_option("--multiplier", cell_multiplier, "groups per node")->required();
  cmd_cell->add_option("--p", cell_p, "clique fidelity probability")->required();
  cmd_cell->add_option("--method", cell_method, "inference method: projection|sdsm")->required();
  cmd_cell->add_option("--reps", cell_reps, "replications")->capture_default_str();
  cmd_cell->add_option("--seed", cell_seed_opt, "master seed")->capture_default_str();
  cmd_cell->add_option("--threads", cell_threads, "worker threads (0 = hardware)")
      ->capture_default_str();
  cmd_cell->add_option("--min-clique-size", cell_min_clique, "smallest clique to sample")
      ->capture_default_str();
  cmd_cell->add_option("--replacement-pool", cell_pool, "outsider pool: nonclique|all")
      ->capture_default_str();
  cell_sdsm.add_to(cmd_cell);
  cmd_cell->add_flag("--csv", cell_csv, "also print the results CSV header and row");

  // experiment
  auto* cmd_experiment = app.add_subcommand("experiment", "run a factorial design to a CSV");
  std::string exp_config, exp_out;
  std::uint64_t exp_seed = 0;
  bool exp_seed_set = false, exp_resume = false;
  int exp_reps = 0, exp_threads = 0;
  cmd_experiment->add_option("--config", exp_config,
                             "design config file (omit for the full default design)");
  cmd_experiment->add_option("--out", exp_out, "output results CSV")->required();
  cmd_experiment->add_option("--seed", exp_seed, "master seed (overrides config)")
      ->each([&](const std::string&) { exp_seed_set = true; });
  cmd_experiment->add_option("--reps", exp_reps, "replications per cell (overrides config)");
  cmd_experiment->add_option("--threads", exp_threads, "worker threads (0 = hardware)")
      ->capture_default_str();
  cmd_experiment->add_flag("--resume", exp_resume, "skip cells already present in the output");

  // report
  auto* cmd_report = app.add_subcommand("report",
                                        "regression and plot-ready tables from a results CSV");
  std::string report_results, report_method = "both";
  std::string report_out_cells, report_out_regression;
  std::string report_undefined = "zero";
  cmd_report->add_option("--results", report_results, "results CSV from 'experiment'")
      ->required();
  cmd_report->add_option("--method", report_method, "projection|sdsm|both")
      ->capture_default_str();
  cmd_report->add_option("--undefined", report_undefined,
                         "undefined correlations in the regression outcome: zero|drop")
      ->capture_default_str();
  cmd_report->add_option("--out-cells", report_out_cells, "write per-cell summary CSV here");
  cmd_report->add_option("--out-regression", report_out_regression,
                         "write regression coefficients CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_generate->parsed()) {
      const NetworkSpec spec = gen_flags.spec();
      auto kv = gen_flags.echo();
      kv.push_back({"seed", std::to_string(gen_seed)});
      kv.push_back({"out", gen_out});
      echo_config(kv);
      Rng rng(gen_seed);
      const UndirectedGraph g = make_network(spec, rng);
      write_text(gen_out, save_edge_list(g));
    } else if (cmd_groups->parsed()) {
      const UndirectedGraph g = read_edge_list_file(groups_graph);
      std::int64_t count = groups_count;
      if (count == 0 && groups_multiplier > 0.0)
        count = std::llround(groups_multiplier * g.node_count());
      if (count <= 0)
        throw ValidationError("one of --num-groups or --multiplier (positive) is required");
      GroupGenSpec spec;
      spec.num_groups = count;
      spec.p_clique = groups_p;
      spec.min_clique_size = groups_min_clique;
      if (groups_pool == "all")
        spec.replace_from_all = true;
      else if (groups_pool != "nonclique")
        throw ValidationError("--replacement-pool must be nonclique|all");
      echo_config({{"graph", groups_graph},
                   {"num_groups", std::to_string(count)},
                   {"p", format_double(groups_p)},
                   {"min_clique_size", std::to_string(groups_min_clique)},
                   {"replacement_pool", groups_pool},
                   {"seed", std::to_string(groups_seed)},
                   {"out", groups_out}});
      Rng rng(groups_seed);
      const BipartiteMembership b = generate_groups(g, spec, rng);
      write_text(groups_out, membership_to_csv(b));
    } else if (cmd_infer->parsed()) {
      const MembershipTable table = parse_membership_csv(read_text(infer_membership));
      const InferenceMethod method = parse_method(infer_method);
      const SdsmConfig cfg = infer_sdsm.config();
      echo_config({{"membership", infer_membership},
                   {"method", infer_method},
                   {"alpha", format_double(cfg.alpha)},
                   {"tail", infer_sdsm.tail},
                   {"pvalues", infer_sdsm.pvalues},
                   {"correction", infer_sdsm.correction},
                   {"out", infer_out}});
      UndirectedGraph inferred = method == InferenceMethod::projection
                                     ? unweighted_projection(table.membership)
                                     : sdsm_backbone(table.membership, cfg);
      // Carry the CSV's agent labels into the edge list.
      inferred = UndirectedGraph(inferred.node_count(), inferred.edges(), table.agent_labels);
      write_text(infer_out, save_edge_list(inferred));
    } else if (cmd_cell->parsed()) {
      const NetworkSpec spec = cell_flags.spec();
      const InferenceMethod method = parse_method(cell_method);
      CellRunContext ctx;
      ctx.sdsm = cell_sdsm.config();
      ctx.min_clique_size = cell_min_clique;
      if (cell_pool == "all")
        ctx.replacement_from_all = true;
      else if (cell_pool != "nonclique")
        throw ValidationError("--replacement-pool must be nonclique|all");
      ctx.threads = cell_threads > 0 ? cell_threads
                                     : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
      auto kv = cell_flags.echo();
      kv.push_back({"multiplier", format_double(cell_multiplier)});
      kv.push_back({"p", format_double(cell_p)});
      kv.push_back({"method", cell_method});
      kv.push_back({"reps", std::to_string(cell_reps)});
      kv.push_back({"seed", std::to_string(cell_seed_opt)});
      kv.push_back({"alpha", format_double(ctx.sdsm.alpha)});
      kv.push_back({"tail", cell_sdsm.tail});
      kv.push_back({"pvalues", cell_sdsm.pvalues});
      kv.push_back({"correction", cell_sdsm.correction});
      kv.push_back({"min_clique_size", std::to_string(cell_min_clique)});
      kv.push_back({"replacement_pool", cell_pool});
      echo_config(kv);
      const std::uint64_t seed =
          cell_seed(cell_seed_opt, spec.name(), cell_multiplier, cell_p, method);
      const CellResult result =
          run_cell(spec, cell_multiplier, cell_p, method, cell_reps, seed, ctx);
      print_cell(result);
      if (cell_csv) {
        std::cout << results_csv_header() << "\n";
        std::cout << cell_to_csv(result) << "\n";
      }
    } else if (cmd_experiment->parsed()) {
      ExperimentDesign design = exp_config.empty()
                                    ? ExperimentDesign::full_factorial()
                                    : parse_design_config(read_text(exp_config));
      if (exp_seed_set) design.master_seed = exp_seed;
      if (exp_reps > 0) design.replications = exp_reps;
      echo_config({{"config", exp_config.empty() ? "(default full factorial)" : exp_config},
                   {"cells", std::to_string(design.cell_count())},
                   {"replications", std::to_string(design.replications)},
                   {"master_seed", std::to_string(design.master_seed)},
                   {"threads", std::to_string(exp_threads)},
                   {"resume", exp_resume ? "true" : "false"},
                   {"out", exp_out}});
      RunOptions opts;
      opts.threads = exp_threads;
      opts.progress = &std::cerr;
      run_design_to_csv(design, exp_out, opts, exp_resume);
      std::cerr << "wrote " << exp_out << "\n";
    } else if (cmd_report->parsed()) {
      const std::vector<CellResult> cells = read_results_csv(report_results);
      std::vector<InferenceMethod> methods;
      if (report_method == "both")
        methods = {InferenceMethod::projection, InferenceMethod::sdsm};
      else
        methods = {parse_method(report_method)};
      UndefinedPolicy policy;
      if (report_undefined == "zero")
        policy = UndefinedPolicy::zero_fill;
      else if (report_undefined == "drop")
        policy = UndefinedPolicy::drop;
      else
        throw ValidationError("--undefined must be zero|drop");
      echo_config({{"results", report_results},
                   {"method", report_method},
                   {"undefined", report_undefined}});

      std::ostringstream reg_csv;
      reg_csv << "method,predictor,B,beta\n";
      for (InferenceMethod m : methods) {
        const RegressionSummary reg = fit_regression(cells, m, policy);
        print_regression(reg, method_token(m));
        for (std::size_t j = 0; j < reg.predictors.size(); ++j)
          reg_csv << method_token(m) << ',' << reg.predictors[j] << ','
                  << format_double(reg.coef_b[j]) << ',' << format_double(reg.coef_beta[j])
                  << "\n";
        reg_csv << method_token(m) << ",intercept," << format_double(reg.intercept) << ",\n";
        reg_csv << method_token(m) << ",r_squared," << format_double(reg.r_squared) << ",\n";
      }
      if (!report_out_regression.empty()) write_text(report_out_regression, reg_csv.str());
      if (!report_out_cells.empty()) {
        std::ostringstream cells_csv;
        cells_csv << "network,multiplier,p_clique,method,mean_r,mean_kappa,mean_jaccard,sd_r,"
                     "reps,undefined_r\n";
        for (const CellResult& c : cells) {
          auto opt = [](const std::optional<double>& v) {
            return v ? format_double(*v) : std::string();
          };
          cells_csv << c.network << ',' << format_double(c.multiplier) << ','
                    << format_double(c.p_clique) << ',' << method_token(c.method) << ','
                    << opt(c.mean_r) << ',' << opt(c.mean_kappa) << ',' << opt(c.mean_jaccard)
                    << ',' << opt(c.sd_r) << ',' << c.replications_run << ',' << c.undefined_r
                    << "\n";
        }
        write_text(report_out_cells, cells_csv.str());
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ComputeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
