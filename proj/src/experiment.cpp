#include "netinfer/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "netinfer/errors.hpp"
#include "netinfer/groups.hpp"
#include "netinfer/metrics.hpp"
#include "netinfer/projection.hpp"

namespace netinfer {

const char* method_token(InferenceMethod m) {
  return m == InferenceMethod::projection ? "projection" : "sdsm";
}

InferenceMethod parse_method(std::string_view token) {
  if (token == "projection") return InferenceMethod::projection;
  if (token == "sdsm") return InferenceMethod::sdsm;
  throw ValidationError("unknown inference method: '" + std::string(token) + "'");
}

std::uint64_t derive_seed(std::uint64_t master, std::span<const std::uint64_t> indices) {
  // Additive combine: XOR would cancel whenever the running state equals the
  // mixed index, creating a structural collision family.
  constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t h = mix64(master + golden);
  for (std::uint64_t v : indices) h = mix64(h + golden + mix64(v + golden));
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> indices) {
  return derive_seed(master, std::span<const std::uint64_t>(indices.begin(), indices.size()));
}

std::uint64_t cell_seed(std::uint64_t master, std::string_view network, double multiplier,
                        double p_clique, InferenceMethod method) {
  return derive_seed(master, {fnv1a64(network), std::bit_cast<std::uint64_t>(multiplier),
                              std::bit_cast<std::uint64_t>(p_clique),
                              static_cast<std::uint64_t>(method)});
}

ExperimentDesign ExperimentDesign::full_factorial() {
  ExperimentDesign d;
  for (const char* token : {"random", "small_world", "scale_free", "caveman", "core_periphery",
                            "dolphin", "florentine", "karate", "law", "tailor"})
    d.networks.push_back(NetworkSpec::named(token));
  return d;
}

std::optional<double> RunningStat::sd_opt() const {
  if (n < 2) return std::nullopt;
  return std::sqrt(m2 / static_cast<double>(n - 1));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

struct RepOutcome {
  bool completed = false;
  std::string error;
  std::optional<double> r, kappa, jaccard;
  double density = 0.0, transitivity = 0.0, n_cliques = 0.0;
  double mean_group_size = 0.0, mean_memberships = 0.0;
};

}  // namespace

CellResult run_cell(const NetworkSpec& truth_spec, double multiplier, double p_clique,
                    InferenceMethod method, int replications, std::uint64_t seed,
                    const CellRunContext& ctx) {
  truth_spec.validate();
  if (replications < 1) throw ValidationError("replications must be >= 1");
  if (p_clique < 0.0 || p_clique > 1.0) throw ValidationError("p_clique must lie in [0,1]");
  const int n = truth_spec.nominal_node_count();
  const std::int64_t n_groups = std::llround(multiplier * n);
  if (n_groups < 1) throw ValidationError("multiplier yields no groups");

  // Empirical truths are fixed across replications; synthetic truths are
  // redrawn inside each replication.
  UndirectedGraph fixed_truth;
  std::vector<std::vector<int>> fixed_pool;
  double fixed_density = 0.0, fixed_transitivity = 0.0;
  if (truth_spec.is_empirical()) {
    fixed_truth = load_empirical(truth_spec.kind, ctx.data_dir);
    fixed_pool = maximal_cliques(fixed_truth);
    fixed_density = density(fixed_truth);
    fixed_transitivity = transitivity(fixed_truth);
  }

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(replications));
  auto run_one = [&](int rep) {
    RepOutcome& out = outcomes[static_cast<std::size_t>(rep)];
    try {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(rep)}));
      UndirectedGraph local_truth;
      std::vector<std::vector<int>> local_pool;
      const UndirectedGraph* truth = &fixed_truth;
      const std::vector<std::vector<int>>* pool = &fixed_pool;
      if (truth_spec.is_empirical()) {
        out.density = fixed_density;
        out.transitivity = fixed_transitivity;
        out.n_cliques = static_cast<double>(fixed_pool.size());
      } else {
        local_truth = make_network(truth_spec, rng, ctx.data_dir);
        local_pool = maximal_cliques(local_truth);
        truth = &local_truth;
        pool = &local_pool;
        out.density = density(local_truth);
        out.transitivity = transitivity(local_truth);
        out.n_cliques = static_cast<double>(local_pool.size());
      }

      GroupGenSpec gspec;
      gspec.num_groups = n_groups;
      gspec.p_clique = p_clique;
      gspec.min_clique_size = ctx.min_clique_size;
      gspec.replace_from_all = ctx.replacement_from_all;
      const BipartiteMembership b = generate_groups(n, *pool, gspec, rng);

      const UndirectedGraph inferred = method == InferenceMethod::projection
                                           ? unweighted_projection(b)
                                           : sdsm_backbone(b, ctx.sdsm);
      const SimilarityScores s = scores(confusion(*truth, inferred));
      out.r = s.correlation;
      out.kappa = s.kappa;
      out.jaccard = s.jaccard;
      const auto [gsize, membs] = membership_stats(b);
      out.mean_group_size = gsize;
      out.mean_memberships = membs;
      out.completed = true;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  };

  const int threads = std::clamp(ctx.threads, 1, replications);
  if (threads == 1) {
    for (int rep = 0; rep < replications; ++rep) run_one(rep);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (int rep = next.fetch_add(1); rep < replications; rep = next.fetch_add(1))
          run_one(rep);
      });
    }
    for (auto& w : workers) w.join();
  }

  CellResult cell;
  cell.network = truth_spec.name();
  cell.multiplier = multiplier;
  cell.p_clique = p_clique;
  cell.method = method;
  cell.groups_observed = n_groups;
  cell.size = static_cast<double>(n);

  RunningStat rs, ks, js;
  double sum_density = 0.0, sum_trans = 0.0, sum_cliques = 0.0;
  double sum_gsize = 0.0, sum_membs = 0.0;
  std::string first_error;
  for (const RepOutcome& out : outcomes) {
    if (!out.completed) {
      ++cell.aborted;
      if (first_error.empty()) first_error = out.error;
      continue;
    }
    ++cell.replications_run;
    if (out.r)
      rs.add(*out.r);
    else
      ++cell.undefined_r;
    if (out.kappa)
      ks.add(*out.kappa);
    else
      ++cell.undefined_kappa;
    if (out.jaccard)
      js.add(*out.jaccard);
    else
      ++cell.undefined_jaccard;
    sum_density += out.density;
    sum_trans += out.transitivity;
    sum_cliques += out.n_cliques;
    sum_gsize += out.mean_group_size;
    sum_membs += out.mean_memberships;
  }
  if (cell.aborted > 0 &&
      static_cast<double>(cell.aborted) > 0.01 * static_cast<double>(replications))
    throw ComputeError("cell " + cell.network + " x" + format_double(multiplier) + " p=" +
                       format_double(p_clique) + " " + method_token(method) + ": " +
                       std::to_string(cell.aborted) + " of " + std::to_string(replications) +
                       " replications aborted; first error: " + first_error);
  if (cell.replications_run > 0) {
    const double nr = static_cast<double>(cell.replications_run);
    cell.density = sum_density / nr;
    cell.transitivity = sum_trans / nr;
    cell.n_maximal_cliques = sum_cliques / nr;
    cell.mean_group_size = sum_gsize / nr;
    cell.mean_memberships = sum_membs / nr;
  }
  cell.mean_r = rs.mean_opt();
  cell.sd_r = rs.sd_opt();
  cell.mean_kappa = ks.mean_opt();
  cell.sd_kappa = ks.sd_opt();
  cell.mean_jaccard = js.mean_opt();
  cell.sd_jaccard = js.sd_opt();
  return cell;
}

namespace {

int effective_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string cell_key(std::string_view network, double multiplier, double p, InferenceMethod m) {
  return std::string(network) + "," + format_double(multiplier) + "," + format_double(p) + "," +
         method_token(m);
}

}  // namespace

std::vector<CellResult> run_design(const ExperimentDesign& design, const RunOptions& opts) {
  CellRunContext ctx;
  ctx.sdsm = design.sdsm;
  ctx.min_clique_size = design.min_clique_size;
  ctx.replacement_from_all = design.replacement_from_all;
  ctx.threads = effective_threads(opts.threads);
  ctx.data_dir = opts.data_dir;

  std::vector<CellResult> results;
  results.reserve(design.cell_count());
  std::size_t done = 0;
  for (const NetworkSpec& net : design.networks) {
    for (double mult : design.multipliers) {
      for (double p : design.p_values) {
        for (InferenceMethod method : design.methods) {
          const std::uint64_t seed =
              cell_seed(design.master_seed, net.name(), mult, p, method);
          CellResult cell =
              run_cell(net, mult, p, method, design.replications, seed, ctx);
          ++done;
          if (opts.progress &&
              (done % std::max(1, opts.progress_stride) == 0 || done == design.cell_count())) {
            (*opts.progress) << "[" << done << "/" << design.cell_count() << "] "
                             << cell_key(cell.network, mult, p, method) << " mean_r="
                             << (cell.mean_r ? format_double(*cell.mean_r) : "undefined")
                             << "\n";
            opts.progress->flush();
          }
          results.push_back(std::move(cell));
        }
      }
    }
  }
  return results;
}

std::string results_csv_header() {
  return "network,multiplier,p_clique,method,reps,undefined_r,mean_r,sd_r,mean_kappa,sd_kappa,"
         "mean_jaccard,sd_jaccard,size,density,transitivity,n_maximal_cliques,mean_group_size,"
         "mean_memberships,groups_observed";
}

namespace {

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

std::string cell_to_csv(const CellResult& c) {
  std::ostringstream out;
  out << c.network << ',' << format_double(c.multiplier) << ',' << format_double(c.p_clique)
      << ',' << method_token(c.method) << ',' << c.replications_run << ',' << c.undefined_r << ','
      << opt_field(c.mean_r) << ',' << opt_field(c.sd_r) << ',' << opt_field(c.mean_kappa) << ','
      << opt_field(c.sd_kappa) << ',' << opt_field(c.mean_jaccard) << ','
      << opt_field(c.sd_jaccard) << ',' << format_double(c.size) << ','
      << format_double(c.density) << ',' << format_double(c.transitivity) << ','
      << format_double(c.n_maximal_cliques) << ',' << format_double(c.mean_group_size) << ','
      << format_double(c.mean_memberships) << ',' << c.groups_observed;
  return out.str();
}

namespace {

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

double parse_number(const std::string& s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(std::string("malformed ") + what + ": '" + s + "'");
  return v;
}

std::optional<double> parse_opt(const std::string& s, const char* what) {
  if (s.empty()) return std::nullopt;
  return parse_number(s, what);
}

}  // namespace

CellResult cell_from_csv(std::string_view line) {
  const auto f = split_csv(line);
  if (f.size() != 19)
    throw ParseError("results row has " + std::to_string(f.size()) + " fields, expected 19");
  CellResult c;
  c.network = f[0];
  c.multiplier = parse_number(f[1], "multiplier");
  c.p_clique = parse_number(f[2], "p_clique");
  c.method = parse_method(f[3]);
  c.replications_run = static_cast<int>(parse_number(f[4], "reps"));
  c.undefined_r = static_cast<int>(parse_number(f[5], "undefined_r"));
  c.mean_r = parse_opt(f[6], "mean_r");
  c.sd_r = parse_opt(f[7], "sd_r");
  c.mean_kappa = parse_opt(f[8], "mean_kappa");
  c.sd_kappa = parse_opt(f[9], "sd_kappa");
  c.mean_jaccard = parse_opt(f[10], "mean_jaccard");
  c.sd_jaccard = parse_opt(f[11], "sd_jaccard");
  c.size = parse_number(f[12], "size");
  c.density = parse_number(f[13], "density");
  c.transitivity = parse_number(f[14], "transitivity");
  c.n_maximal_cliques = parse_number(f[15], "n_maximal_cliques");
  c.mean_group_size = parse_number(f[16], "mean_group_size");
  c.mean_memberships = parse_number(f[17], "mean_memberships");
  c.groups_observed = static_cast<std::int64_t>(parse_number(f[18], "groups_observed"));
  return c;
}

void write_results_csv(const std::filesystem::path& path, const std::vector<CellResult>& cells) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open file for writing: " + path.string());
  out << results_csv_header() << "\n";
  for (const auto& c : cells) out << cell_to_csv(c) << "\n";
}

std::vector<CellResult> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open results CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != results_csv_header())
    throw ParseError(path.string() + ": unexpected header");
  std::vector<CellResult> cells;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      cells.push_back(cell_from_csv(line));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cells;
}

void run_design_to_csv(const ExperimentDesign& design, const std::filesystem::path& out_csv,
                       const RunOptions& opts, bool resume) {
  // Sidecar manifest: the full effective configuration, so any output can be
  // regenerated from the manifest alone.
  {
    std::ofstream mf(out_csv.string() + ".manifest", std::ios::binary);
    if (!mf)
      throw ValidationError("cannot open manifest for writing: " + out_csv.string() +
                            ".manifest");
    mf << "# netinfer experiment manifest\n";
    mf << design_to_config(design);
    mf << "# pvalue auto engine switches to refined-normal above " << kExactAutoMaxLength
       << " groups\n";
    mf << "# threads used: " << effective_threads(opts.threads)
       << " (results are independent of thread count)\n";
  }

  std::map<std::string, std::string> done_rows;  // cell key -> raw CSV line
  if (resume && std::filesystem::exists(out_csv)) {
    std::ifstream in(out_csv, std::ios::binary);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (first) {
        first = false;
        if (line != results_csv_header())
          throw ValidationError("resume: " + out_csv.string() + " has an unexpected header");
        continue;
      }
      if (line.empty()) continue;
      const CellResult c = cell_from_csv(line);
      done_rows[cell_key(c.network, c.multiplier, c.p_clique, c.method)] = line;
    }
  }

  CellRunContext ctx;
  ctx.sdsm = design.sdsm;
  ctx.min_clique_size = design.min_clique_size;
  ctx.replacement_from_all = design.replacement_from_all;
  ctx.threads = effective_threads(opts.threads);
  ctx.data_dir = opts.data_dir;

  // Append finished cells as we go so an interrupted run can resume.
  const bool fresh = !(resume && std::filesystem::exists(out_csv));
  std::ofstream append(out_csv,
                       fresh ? std::ios::binary | std::ios::trunc : std::ios::binary | std::ios::app);
  if (!append) throw ValidationError("cannot open file for writing: " + out_csv.string());
  if (fresh) append << results_csv_header() << "\n";

  std::vector<std::string> canonical_rows;
  std::size_t done = 0;
  for (const NetworkSpec& net : design.networks) {
    for (double mult : design.multipliers) {
      for (double p : design.p_values) {
        for (InferenceMethod method : design.methods) {
          const std::string key = cell_key(net.name(), mult, p, method);
          ++done;
          if (auto it = done_rows.find(key); it != done_rows.end()) {
            canonical_rows.push_back(it->second);
            if (opts.progress)
              (*opts.progress) << "[" << done << "/" << design.cell_count() << "] " << key
                               << " (resumed)\n";
            continue;
          }
          const std::uint64_t seed =
              cell_seed(design.master_seed, net.name(), mult, p, method);
          const CellResult cell =
              run_cell(net, mult, p, method, design.replications, seed, ctx);
          const std::string row = cell_to_csv(cell);
          canonical_rows.push_back(row);
          append << row << "\n";
          append.flush();
          if (opts.progress) {
            (*opts.progress) << "[" << done << "/" << design.cell_count() << "] " << key
                             << " mean_r="
                             << (cell.mean_r ? format_double(*cell.mean_r) : "undefined") << "\n";
            opts.progress->flush();
          }
        }
      }
    }
  }
  append.close();

  // Rewrite in canonical order; the final bytes depend only on the design
  // and the master seed.
  std::ofstream out(out_csv, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open file for writing: " + out_csv.string());
  out << results_csv_header() << "\n";
  for (const auto& row : canonical_rows) out << row << "\n";
}

// --- design config -----------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      const std::string item = trim(std::string_view(s).substr(start, i - start));
      if (!item.empty()) items.push_back(item);
      start = i + 1;
    }
  }
  return items;
}

TailRule parse_tail(const std::string& s) {
  if (s == "upper") return TailRule::upper_one_sided;
  if (s == "two-sided") return TailRule::two_sided_split;
  throw ValidationError("unknown tail rule: '" + s + "' (expected upper|two-sided)");
}

const char* tail_token(TailRule t) {
  return t == TailRule::upper_one_sided ? "upper" : "two-sided";
}

PValueMethod parse_pvalue_method(const std::string& s) {
  if (s == "exact") return PValueMethod::exact;
  if (s == "refined-normal") return PValueMethod::refined_normal;
  if (s == "auto") return PValueMethod::auto_pick;
  throw ValidationError("unknown p-value method: '" + s +
                        "' (expected exact|refined-normal|auto)");
}

const char* pvalue_token(PValueMethod m) {
  switch (m) {
    case PValueMethod::exact: return "exact";
    case PValueMethod::refined_normal: return "refined-normal";
    default: return "auto";
  }
}

Correction parse_correction(const std::string& s) {
  if (s == "none") return Correction::none;
  if (s == "bonferroni") return Correction::bonferroni;
  if (s == "holm") return Correction::holm;
  throw ValidationError("unknown correction: '" + s + "' (expected none|bonferroni|holm)");
}

const char* correction_token(Correction c) {
  switch (c) {
    case Correction::none: return "none";
    case Correction::bonferroni: return "bonferroni";
    default: return "holm";
  }
}

}  // namespace

ExperimentDesign parse_design_config(std::string_view text) {
  ExperimentDesign d;
  d.networks.clear();
  bool saw_networks = false;

  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    try {
      if (key == "networks") {
        for (const auto& token : split_list(value)) d.networks.push_back(NetworkSpec::named(token));
        saw_networks = true;
      } else if (key == "multipliers") {
        d.multipliers.clear();
        for (const auto& token : split_list(value))
          d.multipliers.push_back(parse_number(token, "multiplier"));
      } else if (key == "p_values") {
        d.p_values.clear();
        for (const auto& token : split_list(value))
          d.p_values.push_back(parse_number(token, "p value"));
      } else if (key == "methods") {
        d.methods.clear();
        for (const auto& token : split_list(value)) d.methods.push_back(parse_method(token));
      } else if (key == "replications") {
        d.replications = static_cast<int>(parse_number(value, "replications"));
      } else if (key == "master_seed") {
        d.master_seed = std::stoull(value);
      } else if (key == "alpha") {
        d.sdsm.alpha = parse_number(value, "alpha");
      } else if (key == "tail") {
        d.sdsm.tail = parse_tail(value);
      } else if (key == "pvalues") {
        d.sdsm.pvalue_method = parse_pvalue_method(value);
      } else if (key == "correction") {
        d.sdsm.correction = parse_correction(value);
      } else if (key == "solver_tolerance") {
        d.sdsm.solver_tolerance = parse_number(value, "solver tolerance");
      } else if (key == "solver_max_iterations") {
        d.sdsm.solver_max_iterations = static_cast<int>(parse_number(value, "solver iterations"));
      } else if (key == "min_clique_size") {
        d.min_clique_size = static_cast<int>(parse_number(value, "min clique size"));
      } else if (key == "replacement_pool") {
        if (value == "nonclique")
          d.replacement_from_all = false;
        else if (value == "all")
          d.replacement_from_all = true;
        else
          throw ValidationError("replacement_pool must be nonclique|all");
      } else {
        throw ValidationError("unknown config key: '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!saw_networks)
    for (const NetworkSpec& net : ExperimentDesign::full_factorial().networks)
      d.networks.push_back(net);
  if (d.networks.empty() || d.multipliers.empty() || d.p_values.empty() || d.methods.empty())
    throw ValidationError("design has an empty factor list");
  if (d.replications < 1) throw ValidationError("replications must be >= 1");
  return d;
}

std::string design_to_config(const ExperimentDesign& d) {
  std::ostringstream out;
  out << "networks = ";
  for (std::size_t i = 0; i < d.networks.size(); ++i)
    out << (i ? "," : "") << d.networks[i].name();
  out << "\nmultipliers = ";
  for (std::size_t i = 0; i < d.multipliers.size(); ++i)
    out << (i ? "," : "") << format_double(d.multipliers[i]);
  out << "\np_values = ";
  for (std::size_t i = 0; i < d.p_values.size(); ++i)
    out << (i ? "," : "") << format_double(d.p_values[i]);
  out << "\nmethods = ";
  for (std::size_t i = 0; i < d.methods.size(); ++i)
    out << (i ? "," : "") << method_token(d.methods[i]);
  out << "\nreplications = " << d.replications;
  out << "\nmaster_seed = " << d.master_seed;
  out << "\nalpha = " << format_double(d.sdsm.alpha);
  out << "\ntail = " << tail_token(d.sdsm.tail);
  out << "\npvalues = " << pvalue_token(d.sdsm.pvalue_method);
  out << "\ncorrection = " << correction_token(d.sdsm.correction);
  out << "\nsolver_tolerance = " << format_double(d.sdsm.solver_tolerance);
  out << "\nsolver_max_iterations = " << d.sdsm.solver_max_iterations;
  out << "\nmin_clique_size = " << d.min_clique_size;
  out << "\nreplacement_pool = " << (d.replacement_from_all ? "all" : "nonclique");
  out << "\n";
  return out.str();
}

// --- regression --------------------------------------------------------------

RegressionSummary ols_regression(const std::vector<std::string>& names,
                                 const std::vector<std::vector<double>>& columns,
                                 const std::vector<double>& y) {
  const int p = static_cast<int>(columns.size());
  const int n = static_cast<int>(y.size());
  if (p == 0) throw ValidationError("regression needs at least one predictor");
  if (static_cast<int>(names.size()) != p)
    throw ValidationError("predictor name count does not match column count");
  for (const auto& col : columns)
    if (static_cast<int>(col.size()) != n)
      throw ValidationError("predictor column length does not match outcome length");
  if (n < p + 2) throw ValidationError("regression needs more rows than predictors");

  std::vector<double> mean(p, 0.0), sd(p, 0.0);
  for (int j = 0; j < p; ++j) {
    for (double v : columns[j]) mean[j] += v;
    mean[j] /= n;
    for (double v : columns[j]) sd[j] += (v - mean[j]) * (v - mean[j]);
    sd[j] = std::sqrt(sd[j] / (n - 1));
    if (!(sd[j] > 0.0))
      throw ValidationError("predictor '" + names[j] + "' has fewer than 2 distinct values");
  }
  double y_mean = 0.0;
  for (double v : y) y_mean += v;
  y_mean /= n;
  double y_sd = 0.0;
  for (double v : y) y_sd += (v - y_mean) * (v - y_mean);
  y_sd = std::sqrt(y_sd / (n - 1));
  if (!(y_sd > 0.0)) throw ValidationError("outcome has no variance");

  // Normal equations on z-scored predictors; much better conditioned than
  // the raw scales (groups_observed runs to thousands, density below 0.2).
  const int dim = p + 1;
  std::vector<std::vector<double>> a(dim, std::vector<double>(dim + 1, 0.0));
  auto z = [&](int j, int row) { return (columns[j][row] - mean[j]) / sd[j]; };
  for (int row = 0; row < n; ++row) {
    for (int i = 0; i < dim; ++i) {
      const double xi = i == 0 ? 1.0 : z(i - 1, row);
      for (int j = i; j < dim; ++j) {
        const double xj = j == 0 ? 1.0 : z(j - 1, row);
        a[i][j] += xi * xj;
      }
      a[i][dim] += xi * y[row];
    }
  }
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < i; ++j) a[i][j] = a[j][i];

  // Gaussian elimination with partial pivoting.
  std::vector<int> col_of(dim);
  for (int i = 0; i < dim; ++i) col_of[i] = i;
  for (int k = 0; k < dim; ++k) {
    int best = k;
    for (int i = k + 1; i < dim; ++i)
      if (std::abs(a[i][k]) > std::abs(a[best][k])) best = i;
    std::swap(a[k], a[best]);
    if (std::abs(a[k][k]) < 1e-9 * n) {
      const int bad = k == 0 ? 0 : k - 1;
      throw ValidationError("design matrix is rank deficient; collinear predictor: '" +
                            names[std::min(bad, p - 1)] + "'");
    }
    for (int i = 0; i < dim; ++i) {
      if (i == k) continue;
      const double factor = a[i][k] / a[k][k];
      for (int j = k; j <= dim; ++j) a[i][j] -= factor * a[k][j];
    }
  }
  std::vector<double> coef_std(dim);
  for (int i = 0; i < dim; ++i) coef_std[i] = a[i][dim] / a[i][i];

  RegressionSummary s;
  s.predictors = names;
  s.coef_b.resize(p);
  s.coef_beta.resize(p);
  s.n_rows = n;
  double shift = 0.0;
  for (int j = 0; j < p; ++j) {
    s.coef_b[j] = coef_std[j + 1] / sd[j];
    s.coef_beta[j] = coef_std[j + 1] / y_sd;
    shift += s.coef_b[j] * mean[j];
  }
  s.intercept = coef_std[0] - shift;

  double sse = 0.0, sst = 0.0;
  for (int row = 0; row < n; ++row) {
    double pred = s.intercept;
    for (int j = 0; j < p; ++j) pred += s.coef_b[j] * columns[j][row];
    sse += (y[row] - pred) * (y[row] - pred);
    sst += (y[row] - y_mean) * (y[row] - y_mean);
  }
  s.r_squared = 1.0 - sse / sst;
  return s;
}

RegressionSummary fit_regression(const std::vector<CellResult>& cells,
                                 std::optional<InferenceMethod> filter,
                                 UndefinedPolicy policy) {
  const std::vector<std::string> names = {
      "size",          "density",          "transitivity",    "n_maximal_cliques",
      "mean_group_size", "mean_memberships", "groups_observed", "p_clique"};
  std::vector<std::vector<double>> cols(names.size());
  std::vector<double> y;
  for (const CellResult& c : cells) {
    if (filter && c.method != *filter) continue;
    if (!c.mean_r) continue;
    cols[0].push_back(c.size);
    cols[1].push_back(c.density);
    cols[2].push_back(c.transitivity);
    cols[3].push_back(c.n_maximal_cliques);
    cols[4].push_back(c.mean_group_size);
    cols[5].push_back(c.mean_memberships);
    cols[6].push_back(c.multiplier);  // groups observed per node
    cols[7].push_back(c.p_clique);
    double outcome = *c.mean_r;
    if (policy == UndefinedPolicy::zero_fill && c.replications_run > 0)
      outcome *= static_cast<double>(c.replications_run - c.undefined_r) /
                 static_cast<double>(c.replications_run);
    y.push_back(outcome);
  }
  return ols_regression(names, cols, y);
}

}  // namespace netinfer
