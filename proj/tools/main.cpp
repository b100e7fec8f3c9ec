// Command-line front end: simulation experiments, the quadratic property
// check, and re-aggregation of result CSVs.

#include "semiprof/garchm.hpp"
#include "semiprof/metrics.hpp"
#include "semiprof/quadratic.hpp"
#include "semiprof/solver.hpp"
#include "semiprof/toy.hpp"
#include "semiprof/transform.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace semiprof;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// "lo:hi:step" range or comma-separated values
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0) {
            throw CLI::ValidationError("grid", "expected lo:hi:step with step > 0");
        }
        const int count =
            1 + int(std::floor((hi - lo) / step + 1e-9));
        for (int i = 0; i < count; ++i) out.push_back(lo + i * step);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) out.push_back(std::stod(item));
        }
    }
    if (out.empty()) throw CLI::ValidationError("grid", "empty grid");
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::uint64_t config_hash(const std::string& canonical) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    bool to_file() const { return file_.is_open(); }

  private:
    std::ofstream file_;
};

json coords_json(const Aggregates& agg, const std::vector<std::string>& names) {
    json out;
    for (std::size_t j = 0; j < agg.coords.size(); ++j) {
        const std::string key = j < names.size() ? names[j] : "theta" + std::to_string(j + 1);
        out[key] = {{"bias", agg.coords[j].bias},
                    {"se", agg.coords[j].se},
                    {"mae", agg.coords[j].mae},
                    {"rmse", agg.coords[j].rmse}};
    }
    return out;
}

json meta_json(const std::string& experiment, int n_or_t, int reps, std::uint64_t seed,
               const std::string& canonical) {
    return {{"experiment", experiment},
            {"n_or_T", n_or_t},
            {"reps", reps},
            {"seed", seed},
            {"config_hash", config_hash(canonical)}};
}

// config file values fill in flags the user did not pass
void apply_config(const json& cfg, const std::map<std::string, CLI::Option*>& opts,
                  const std::map<std::string, std::function<void(const json&)>>& setters) {
    for (const auto& [key, setter] : setters) {
        if (!cfg.contains(key)) continue;
        const auto it = opts.find(key);
        if (it != opts.end() && it->second->count() > 0) continue;
        setter(cfg.at(key));
    }
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json cfg;
    in >> cfg;
    return cfg;
}

int run_toy(const std::string& alpha_grid_text, const std::string& c_grid_text, double tol,
            const std::string& paths_file, const std::string& out_path) {
    const std::vector<double> alphas = parse_grid(alpha_grid_text);
    const std::vector<double> cs = parse_grid(c_grid_text);
    const auto table = toy_step_experiment(alphas, cs, tol);

    Output out(out_path);
    out.stream() << "method,alpha,C,mean_steps\n";
    for (const auto& cell : table) {
        out.stream() << method_name(cell.method) << ',' << fmt_short(cell.alpha) << ','
                     << fmt_short(cell.c) << ',' << fmt_short(cell.mean_steps) << '\n';
    }

    if (!paths_file.empty()) {
        // convergence paths from the contour point at alpha = 1.6, C = 4
        const double alpha = 1.6;
        const double c = 4.0;
        std::ofstream pf(paths_file);
        if (!pf) throw std::runtime_error("cannot open output file: " + paths_file);
        pf << "method,step_index,x,y\n";
        for (SolveMethod m : {SolveMethod::newton_raphson, SolveMethod::naive_iteration,
                              SolveMethod::implicit_profiling}) {
            const EstimatingSystem sys = toy_system(alpha);
            auto [x0, y0] = toy_initial_point(alpha, c, toy_gamma_values().front());
            ParameterState init{Vec::Constant(1, x0), Vec::Constant(1, y0)};
            SolverConfig cfg;
            cfg.method = m;
            cfg.tol = tol;
            cfg.max_iter = 500;
            cfg.init_lambda_mode = InitLambdaMode::given;
            const SolveReport rep = run_solver(sys, init, cfg);
            pf << method_name(m) << ",0," << fmt(x0) << ',' << fmt(y0) << '\n';
            for (std::size_t k = 0; k < rep.trace.size(); ++k) {
                pf << method_name(m) << ',' << (k + 1) << ',' << fmt(rep.trace[k].theta[0])
                   << ',' << fmt(rep.trace[k].lambda[0]) << '\n';
            }
        }
    }
    return 0;
}

int run_transform(const TransformExperimentConfig& cfg, bool timing,
                  const std::string& out_path) {
    const ExperimentResult res = run_transform_experiment(cfg);
    const int p = static_cast<int>(res.truth.size());

    Output out(out_path);
    out.stream() << "method,n,rep,mse_contrib,iterations,seconds,converged\n";
    for (const auto& rec : res.per_rep) {
        const double contrib =
            (rec.estimate - res.truth).squaredNorm() / double(p);
        out.stream() << rec.method << ',' << cfg.n << ',' << rec.rep << ',' << fmt(contrib)
                     << ',' << rec.iterations << ',' << fmt(timing ? rec.seconds : 0.0) << ','
                     << (rec.converged ? 1 : 0) << '\n';
    }

    if (out.to_file()) {
        const std::string canonical = "transform|" + std::to_string(cfg.n) + "|" +
                                      std::to_string(cfg.reps) + "|" + std::to_string(cfg.seed) +
                                      "|" + fmt(cfg.h_scale) + "|" + fmt(cfg.tol);
        json j;
        j["meta"] = meta_json("transform", cfg.n, cfg.reps, cfg.seed, canonical);
        for (const auto& [name, agg] : res.aggregates) {
            j["aggregates"][name] = coords_json(agg, {});
            j["aggregates"][name]["mse"] = agg.mse;
            j["aggregates"][name]["rmse"] = agg.rmse_scalar;
            j["aggregates"][name]["mean_iterations"] = agg.mean_iterations;
            j["aggregates"][name]["excluded"] = agg.excluded_count;
        }
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

int run_garchm(const GarchExperimentConfig& cfg, bool timing, const std::string& out_path) {
    const ExperimentResultGarch res = run_garchm_experiment(cfg);
    const char setup_name = cfg.setup == GarchSetup::A ? 'A' : 'B';

    Output out(out_path);
    out.stream() << "method,setup,T,rep,omega_hat,alpha_hat,beta_hat,iterations,seconds,"
                    "converged,extrapolation_warnings\n";
    for (const auto& rec : res.per_rep) {
        out.stream() << rec.method << ',' << setup_name << ',' << cfg.t_len << ',' << rec.rep
                     << ',' << fmt(rec.estimate[0]) << ',' << fmt(rec.estimate[1]) << ','
                     << fmt(rec.estimate[2]) << ',' << rec.iterations << ','
                     << fmt(timing ? rec.seconds : 0.0) << ',' << (rec.converged ? 1 : 0) << ','
                     << rec.extrapolation_warnings << '\n';
    }

    if (out.to_file()) {
        const std::string canonical = std::string("garchm|") + setup_name + "|" +
                                      std::to_string(cfg.t_len) + "|" + std::to_string(cfg.reps) +
                                      "|" + std::to_string(cfg.seed) + "|" +
                                      fmt(cfg.noise_scale) + "|" + fmt(cfg.tol);
        json j;
        j["meta"] = meta_json("garchm", cfg.t_len, cfg.reps, cfg.seed, canonical);
        for (const auto& [name, agg] : res.aggregates) {
            j["aggregates"][name] = coords_json(agg, {"omega", "alpha", "beta"});
            j["aggregates"][name]["mean_iterations"] = agg.mean_iterations;
            j["aggregates"][name]["excluded"] = agg.excluded_count;
        }
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

int run_quadcheck(int p, int q, int trials, double cond_max, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    int ip_pass = 0;
    int nr_pass = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const QuadraticProblem qp = random_quadratic(p, q, cond_max, rng());
        const EstimatingSystem sys = qp.system();
        ParameterState init;
        init.theta.resize(p);
        init.lambda.resize(q);
        for (int i = 0; i < p; ++i) init.theta[i] = normal(rng);
        for (int i = 0; i < q; ++i) init.lambda[i] = normal(rng);

        SolverConfig cfg;
        cfg.tol = 1e-10;
        cfg.init_lambda_mode = InitLambdaMode::given;

        cfg.method = SolveMethod::implicit_profiling;
        const SolveReport ip = run_solver(sys, init, cfg);
        if (ip.converged && ip.iterations <= 2 && ip.residual_psi <= 1e-10 &&
            ip.residual_phi <= 1e-10) {
            ++ip_pass;
        }
        cfg.method = SolveMethod::newton_raphson;
        const SolveReport nr = run_solver(sys, init, cfg);
        if (nr.converged && nr.iterations == 1) ++nr_pass;
    }
    std::cout << "ip: " << ip_pass << '/' << trials << " converged within two steps\n";
    std::cout << "nr: " << nr_pass << '/' << trials << " converged in one step\n";
    const bool ok = ip_pass == trials && nr_pass == trials;
    std::cout << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? 0 : 1;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

int col_of(const CsvTable& t, const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == name) return static_cast<int>(i);
    }
    throw std::runtime_error("column not found: " + name);
}

int run_report(const std::string& in_path, const std::string& format,
               const std::string& out_path) {
    const CsvTable table = read_csv(in_path);
    Output out(out_path);
    std::ostream& os = out.stream();

    const bool garch = std::find(table.header.begin(), table.header.end(), "omega_hat") !=
                       table.header.end();
    if (garch) {
        const int c_method = col_of(table, "method");
        const int c_setup = col_of(table, "setup");
        const int c_t = col_of(table, "T");
        const int c_om = col_of(table, "omega_hat");
        const int c_al = col_of(table, "alpha_hat");
        const int c_be = col_of(table, "beta_hat");
        const int c_it = col_of(table, "iterations");
        const int c_sec = col_of(table, "seconds");
        const int c_conv = col_of(table, "converged");

        std::map<std::string, std::vector<PerRepRecord>> groups;
        std::map<std::string, GarchSetup> setups;
        for (const auto& row : table.rows) {
            PerRepRecord rec;
            rec.method = row[c_method];
            rec.estimate.resize(3);
            rec.estimate << std::stod(row[c_om]), std::stod(row[c_al]), std::stod(row[c_be]);
            rec.iterations = std::stoi(row[c_it]);
            rec.seconds = std::stod(row[c_sec]);
            rec.converged = row[c_conv] == "1";
            const std::string key = rec.method + "|" + row[c_setup] + "|" + row[c_t];
            groups[key].push_back(std::move(rec));
            setups[key] = row[c_setup] == "B" ? GarchSetup::B : GarchSetup::A;
        }

        json j;
        for (const auto& [key, recs] : groups) {
            const Vec truth = garch_paper_theta(setups.at(key)).to_vec();
            const Aggregates agg = aggregate_metrics(recs, truth);
            if (format == "table") {
                os << key << "  (" << agg.converged_count << " converged, "
                   << agg.excluded_count << " excluded)\n";
                os << "            omega       alpha       beta\n";
                const char* names[] = {"Bias", "SE", "MAE", "RMSE"};
                for (int r = 0; r < 4; ++r) {
                    os << names[r];
                    for (int pad = int(std::string(names[r]).size()); pad < 8; ++pad) os << ' ';
                    for (int jx = 0; jx < 3; ++jx) {
                        const auto& c = agg.coords[jx];
                        const double v = r == 0 ? c.bias : r == 1 ? c.se : r == 2 ? c.mae : c.rmse;
                        char buf[32];
                        std::snprintf(buf, sizeof(buf), "%12.4f", v);
                        os << buf;
                    }
                    os << '\n';
                }
                os << '\n';
            } else if (format == "csv") {
                static bool header_done = false;
                if (!header_done) {
                    os << "group,coord,bias,se,mae,rmse\n";
                    header_done = true;
                }
                const char* coords[] = {"omega", "alpha", "beta"};
                for (int jx = 0; jx < 3; ++jx) {
                    const auto& c = agg.coords[jx];
                    os << key << ',' << coords[jx] << ',' << fmt_short(c.bias) << ','
                       << fmt_short(c.se) << ',' << fmt_short(c.mae) << ',' << fmt_short(c.rmse)
                       << '\n';
                }
            } else {
                j["aggregates"][key] = coords_json(agg, {"omega", "alpha", "beta"});
                j["aggregates"][key]["mean_iterations"] = agg.mean_iterations;
            }
        }
        if (format == "json") {
            j["meta"] = {{"experiment", "garchm"}, {"source", in_path}};
            os << j.dump(2) << '\n';
        }
        return 0;
    }

    // transformation-model schema: per-replicate mse contributions
    const int c_method = col_of(table, "method");
    const int c_n = col_of(table, "n");
    const int c_mse = col_of(table, "mse_contrib");
    const int c_it = col_of(table, "iterations");
    const int c_sec = col_of(table, "seconds");
    const int c_conv = col_of(table, "converged");
    struct Cell {
        double mse = 0, iters = 0, seconds = 0;
        int count = 0, excluded = 0;
    };
    std::map<std::string, Cell> cells;
    for (const auto& row : table.rows) {
        Cell& cell = cells[row[c_method] + "|" + row[c_n]];
        if (row[c_conv] != "1") {
            ++cell.excluded;
            continue;
        }
        cell.mse += std::stod(row[c_mse]);
        cell.iters += std::stoi(row[c_it]);
        cell.seconds += std::stod(row[c_sec]);
        ++cell.count;
    }
    json j;
    if (format == "table") {
        os << "group             MSE     RMSE  Iterations     Time\n";
    } else if (format == "csv") {
        os << "group,mse,rmse,mean_iterations,total_seconds\n";
    }
    for (const auto& [key, cell] : cells) {
        if (cell.count == 0) throw std::runtime_error("no converged rows in group " + key);
        const double mse = cell.mse / cell.count;
        // vector rmse; mse_contrib carries the coordinate average, so scale
        // back up by the generator's theta dimension
        const double rmse = std::sqrt(mse * double(transform_paper_theta().size()));
        const double iters = cell.iters / cell.count;
        if (format == "table") {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%-14s %8.3f %8.3f %11.2f %8.2f\n", key.c_str(), mse,
                          rmse, iters, cell.seconds);
            os << buf;
        } else if (format == "csv") {
            os << key << ',' << fmt_short(mse) << ',' << fmt_short(rmse) << ','
               << fmt_short(iters) << ',' << fmt_short(cell.seconds) << '\n';
        } else {
            j["aggregates"][key] = {{"mse", mse},
                                    {"rmse", rmse},
                                    {"mean_iterations", iters},
                                    {"total_seconds", cell.seconds},
                                    {"excluded", cell.excluded}};
        }
    }
    if (format == "json") {
        j["meta"] = {{"experiment", "transform"}, {"source", in_path}};
        os << j.dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiparametric implicit profiling toolkit"};
    app.require_subcommand(1);

    std::string out_path;
    int threads = 0;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_path, "output file (default stdout)");
        sub->add_option("--threads", threads, "worker threads (0 = SEMIPROF_THREADS or cores)");
        sub->add_option("--config", config_path, "JSON config file; flags take precedence");
    };

    // toy
    auto* toy = app.add_subcommand("toy", "step-count experiment on the bivariate loss");
    std::string alpha_grid = "0:1.8:0.2";
    std::string c_grid = "1,4,9,16,25,36,49,64,81,100";
    double toy_tol = 1e-6;
    std::string paths_file;
    auto* o_ag = toy->add_option("--alpha-grid", alpha_grid, "alpha grid (lo:hi:step or list)");
    auto* o_cg = toy->add_option("--c-grid", c_grid, "contour level grid");
    auto* o_tt = toy->add_option("--tol", toy_tol, "convergence tolerance");
    auto* o_pf = toy->add_option("--paths", paths_file, "also write a convergence-path CSV here");
    add_common(toy);

    // transform
    auto* transform = app.add_subcommand("transform", "transformation-model replication study");
    TransformExperimentConfig tcfg;
    std::string t_methods = "ip,naive,nr";
    bool t_timing = false;
    auto* o_tn = transform->add_option("--n", tcfg.n, "sample size");
    auto* o_tr = transform->add_option("--reps", tcfg.reps, "replications");
    auto* o_ts = transform->add_option("--seed", tcfg.seed, "master seed");
    auto* o_tm = transform->add_option("--methods", t_methods, "comma list: ip,naive,nr");
    auto* o_th = transform->add_option("--h-scale", tcfg.h_scale, "bandwidth scale factor");
    auto* o_ttol = transform->add_option("--tol", tcfg.tol, "convergence tolerance");
    transform->add_flag("--timing", t_timing, "report wall times in the CSV");
    add_common(transform);

    // garchm
    auto* garchm = app.add_subcommand("garchm", "GARCH-in-mean replication study");
    GarchExperimentConfig gcfg;
    std::string g_setup = "A";
    std::string g_methods = "ip,backfit";
    bool g_timing = false;
    auto* o_gs = garchm->add_option("--setup", g_setup, "experimental setup A or B")
                     ->check(CLI::IsMember({"A", "B"}));
    auto* o_gt = garchm->add_option("--t", gcfg.t_len, "series length");
    auto* o_gr = garchm->add_option("--reps", gcfg.reps, "replications");
    auto* o_gsd = garchm->add_option("--seed", gcfg.seed, "master seed");
    auto* o_gm = garchm->add_option("--methods", g_methods, "comma list: ip,backfit");
    auto* o_gn = garchm->add_option("--noise", gcfg.noise_scale, "innovation scale");
    auto* o_gtol = garchm->add_option("--tol", gcfg.tol, "convergence tolerance");
    garchm->add_flag("--timing", g_timing, "report wall times in the CSV");
    add_common(garchm);

    // quadcheck
    auto* quadcheck = app.add_subcommand("quadcheck", "two-step property check on quadratics");
    int q_p = 3;
    int q_q = 10;
    int q_trials = 200;
    double q_cond = 1e3;
    std::uint64_t q_seed = 1;
    quadcheck->add_option("--p", q_p, "theta dimension");
    quadcheck->add_option("--q", q_q, "lambda dimension");
    quadcheck->add_option("--trials", q_trials, "number of random problems");
    quadcheck->add_option("--cond-max", q_cond, "condition number bound");
    quadcheck->add_option("--seed", q_seed, "master seed");
    add_common(quadcheck);

    // report
    auto* report = app.add_subcommand("report", "aggregate a results CSV");
    std::string r_in;
    std::string r_format = "table";
    report->add_option("--in", r_in, "per-replicate results CSV")->required();
    report->add_option("--format", r_format, "table, csv or json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    add_common(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const json cfg = load_config(config_path);
        if (toy->parsed()) {
            apply_config(cfg,
                         {{"alpha_grid", o_ag}, {"c_grid", o_cg}, {"tol", o_tt}, {"paths", o_pf}},
                         {{"alpha_grid", [&](const json& v) { alpha_grid = v.get<std::string>(); }},
                          {"c_grid", [&](const json& v) { c_grid = v.get<std::string>(); }},
                          {"tol", [&](const json& v) { toy_tol = v.get<double>(); }},
                          {"paths", [&](const json& v) { paths_file = v.get<std::string>(); }}});
            return run_toy(alpha_grid, c_grid, toy_tol, paths_file, out_path);
        }
        if (transform->parsed()) {
            apply_config(
                cfg,
                {{"n", o_tn}, {"reps", o_tr}, {"seed", o_ts}, {"methods", o_tm},
                 {"h_scale", o_th}, {"tol", o_ttol}},
                {{"n", [&](const json& v) { tcfg.n = v.get<int>(); }},
                 {"reps", [&](const json& v) { tcfg.reps = v.get<int>(); }},
                 {"seed", [&](const json& v) { tcfg.seed = v.get<std::uint64_t>(); }},
                 {"methods", [&](const json& v) { t_methods = v.get<std::string>(); }},
                 {"h_scale", [&](const json& v) { tcfg.h_scale = v.get<double>(); }},
                 {"tol", [&](const json& v) { tcfg.tol = v.get<double>(); }}});
            tcfg.threads = threads;
            tcfg.methods.clear();
            for (const auto& name : split_list(t_methods)) {
                if (name == "ip") tcfg.methods.push_back(SolveMethod::implicit_profiling);
                else if (name == "naive") tcfg.methods.push_back(SolveMethod::naive_iteration);
                else if (name == "nr") tcfg.methods.push_back(SolveMethod::newton_raphson);
                else throw std::runtime_error("unknown method: " + name);
            }
            return run_transform(tcfg, t_timing, out_path);
        }
        if (garchm->parsed()) {
            apply_config(
                cfg,
                {{"setup", o_gs}, {"T", o_gt}, {"reps", o_gr}, {"seed", o_gsd},
                 {"methods", o_gm}, {"noise", o_gn}, {"tol", o_gtol}},
                {{"setup", [&](const json& v) { g_setup = v.get<std::string>(); }},
                 {"T", [&](const json& v) { gcfg.t_len = v.get<int>(); }},
                 {"reps", [&](const json& v) { gcfg.reps = v.get<int>(); }},
                 {"seed", [&](const json& v) { gcfg.seed = v.get<std::uint64_t>(); }},
                 {"methods", [&](const json& v) { g_methods = v.get<std::string>(); }},
                 {"noise", [&](const json& v) { gcfg.noise_scale = v.get<double>(); }},
                 {"tol", [&](const json& v) { gcfg.tol = v.get<double>(); }}});
            gcfg.threads = threads;
            gcfg.setup = g_setup == "B" ? GarchSetup::B : GarchSetup::A;
            gcfg.methods.clear();
            for (const auto& name : split_list(g_methods)) {
                if (name == "ip") gcfg.methods.push_back(GarchMethod::ip);
                else if (name == "backfit") gcfg.methods.push_back(GarchMethod::backfit);
                else throw std::runtime_error("unknown method: " + name);
            }
            return run_garchm(gcfg, g_timing, out_path);
        }
        if (quadcheck->parsed()) {
            return run_quadcheck(q_p, q_q, q_trials, q_cond, q_seed);
        }
        if (report->parsed()) {
            return run_report(r_in, r_format, out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
