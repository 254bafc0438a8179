// Command-line front end: construct and verify arrays, run protocol rounds,
// audit query privacy, and sweep parameter grids into CSV/JSON reports.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "madc/madc.hpp"

using json = nlohmann::ordered_json;

namespace {

std::string fraction(const madc::rational& r) { return r.str(); }

std::string decimal(const madc::rational& r) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", r.to_double());
    return buf;
}

std::string format_params(const madc::pda_params& p) {
    std::string s = "(" + std::to_string(p.k) + "," + std::to_string(p.f) + "," +
                    std::to_string(p.z) + "," + std::to_string(p.s) + ")";
    s += ", g=" + (p.g ? std::to_string(*p.g) : std::string("-"));
    s += ", l=" + (p.l ? std::to_string(*p.l) : std::string("-"));
    return s;
}

// Output sink: "-" means stdout; relative paths are placed under --out-dir.
class sink {
  public:
    sink(const std::string& path, const std::string& out_dir) {
        if (path == "-") return;
        resolved_ = path;
        if (!out_dir.empty() && path.front() != '/') resolved_ = out_dir + "/" + path;
        file_.open(resolved_);
        if (!file_) throw madc::param_error("cannot open output file " + resolved_);
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void done() {
        if (file_.is_open()) {
            file_.close();
            std::cout << "wrote " << resolved_ << "\n";
        }
    }

  private:
    std::string resolved_;
    std::ofstream file_;
};

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw madc::param_error(std::string(what) + ": bad integer `" + tok + "`");
        }
    if (out.empty()) throw madc::param_error(std::string(what) + ": empty list");
    return out;
}

// "4", "2..6", or "2,4,6".
std::vector<int> parse_range(const std::string& text, const char* what) {
    auto dots = text.find("..");
    if (dots != std::string::npos) {
        int lo, hi;
        try {
            lo = std::stoi(text.substr(0, dots));
            hi = std::stoi(text.substr(dots + 2));
        } catch (const std::exception&) {
            throw madc::param_error(std::string(what) + ": bad range `" + text + "`");
        }
        if (lo > hi) throw madc::param_error(std::string(what) + ": empty range `" + text + "`");
        std::vector<int> out;
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    return parse_int_list(text, what);
}

std::vector<std::vector<int>> parse_groups(const std::string& text, const char* what) {
    std::vector<std::vector<int>> out;
    std::stringstream ss(text);
    std::string group;
    while (std::getline(ss, group, ';')) out.push_back(parse_int_list(group, what));
    return out;
}

std::string packet_str(const madc::packet_id& id) {
    return std::to_string(id.function) + ":" + std::to_string(id.block) + ":" +
           std::to_string(id.row) + ":" + std::to_string(id.superscript);
}

// Valid attachment widths for one model and inner dimension.
std::vector<int> valid_alphas(madc::model_kind model, int inner) {
    std::vector<int> out;
    if (model == madc::model_kind::connect) {
        for (int a = 1; a <= inner - 1; ++a) out.push_back(a);
    } else {
        for (int a = 1; 2 * a < inner; ++a)
            if ((inner + a) % 2 == 0) out.push_back(a);
    }
    return out;
}

struct common_options {
    std::string out_dir;
    std::string out = "-";
    std::string format = "csv";
};

void add_output_options(CLI::App* cmd, common_options& opt) {
    cmd->add_option("--out", opt.out, "output file, - for stdout")->capture_default_str();
    cmd->add_option("--format", opt.format, "report format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

// ---------------------------------------------------------------- construct

struct construct_options {
    std::string model;
    int f = 0, q = 0, alpha = 0, k = 0;
    bool transposed = false;
    common_options out;
};

int cmd_construct(const construct_options& o) {
    madc::model_kind model = madc::parse_model(o.model);
    int inner = model == madc::model_kind::connect ? o.f : o.q;
    if (inner <= 0)
        throw madc::param_error(model == madc::model_kind::connect ? "construct: --f required"
                                                                   : "construct: --q required");
    madc::pda_array array = [&] {
        if (o.k == 0) {
            madc::pda_array base = model == madc::model_kind::connect
                                       ? madc::man_pda(inner, o.alpha)
                                       : madc::cyclic_pda(inner, o.alpha);
            return o.transposed ? madc::transpose(base) : base;
        }
        if (o.transposed)
            throw madc::param_error("construct: --transpose applies only to base arrays (--k 0)");
        return model == madc::model_kind::connect ? madc::construction1(inner, o.alpha, o.k)
                                                  : madc::construction2(inner, o.alpha, o.k);
    }();
    madc::pda_params params = madc::inspect_pda(array);

    sink out(o.out.out, o.out.out_dir);
    out.stream() << madc::serialize_pda_text(array);
    out.done();
    (o.out.out == "-" ? std::cerr : std::cout) << format_params(params) << "\n";
    return 0;
}

// ------------------------------------------------------------------- verify

struct verify_options {
    std::string path;
    bool families = false;
    int f_max = 8, q_max = 20;
    common_options out;
};

int verify_families(const verify_options& o) {
    sink out(o.out.out, o.out.out_dir);
    json rows = json::array();
    long long checked = 0;
    for (int f = 2; f <= o.f_max; ++f)
        for (int alpha = 1; alpha <= f - 1; ++alpha) {
            madc::pda_array a = madc::man_pda(f, alpha);
            madc::pda_params p = madc::verify_pda(a);
            madc::pda_params tp = madc::verify_pda(madc::transpose(a));
            bool ok = p.k == f && p.f == static_cast<int>(madc::binomial(f, alpha)) &&
                      p.z == static_cast<int>(madc::binomial(f - 1, alpha - 1)) &&
                      p.s == static_cast<int>(madc::binomial(f, alpha + 1)) &&
                      madc::check_regularity(a) == alpha + 1 &&
                      tp.k == p.f && tp.f == f && tp.z == alpha && tp.s == p.s;
            if (!ok) throw madc::pda_violation("subset family profile mismatch at F=" +
                                               std::to_string(f) + ", alpha=" +
                                               std::to_string(alpha));
            rows.push_back({{"family", "subset"},
                            {"inner", f},
                            {"alpha", alpha},
                            {"params", format_params(madc::inspect_pda(a))}});
            ++checked;
        }
    for (int q = 3; q <= o.q_max; ++q)
        for (int alpha : valid_alphas(madc::model_kind::cyclic, q)) {
            madc::pda_array a = madc::cyclic_pda(q, alpha);
            madc::pda_params p = madc::verify_pda(a);
            bool ok = p.k == q && p.f == q && p.z == alpha && p.s == q * (q - alpha) / 2 &&
                      madc::check_regularity(a) == 2 && madc::check_l_cyclic(a, 1);
            if (!ok) throw madc::pda_violation("cyclic family profile mismatch at Q=" +
                                               std::to_string(q) + ", alpha=" +
                                               std::to_string(alpha));
            rows.push_back({{"family", "cyclic"},
                            {"inner", q},
                            {"alpha", alpha},
                            {"params", format_params(madc::inspect_pda(a))}});
            ++checked;
        }
    if (o.out.format == "json") {
        json report{{"command", "verify"},
                    {"mode", "families"},
                    {"f_max", o.f_max},
                    {"q_max", o.q_max},
                    {"members", rows},
                    {"checked", checked},
                    {"pass", true}};
        out.stream() << report.dump(2) << "\n";
    } else {
        out.stream() << "family,inner,alpha,params\n";
        for (const auto& r : rows)
            out.stream() << r["family"].get<std::string>() << "," << r["inner"] << ","
                         << r["alpha"] << ",\"" << r["params"].get<std::string>() << "\"\n";
    }
    out.done();
    std::cerr << "verified " << checked << " family members\n";
    return 0;
}

int cmd_verify(const verify_options& o) {
    if (o.families) return verify_families(o);
    if (o.path.empty()) throw madc::param_error("verify: need a file path or --families");
    std::ifstream in(o.path);
    if (!in) throw madc::param_error("verify: cannot open " + o.path);
    std::stringstream buf;
    buf << in.rdbuf();
    madc::pda_array array = madc::parse_pda_text(buf.str());
    madc::pda_params params = madc::inspect_pda(array);  // throws with a witness
    std::cout << format_params(params) << "\n";
    std::cout << "OK\n";
    return 0;
}

// ----------------------------------------------------------------- simulate

struct simulate_options {
    std::string model;
    int reducers = 0, f = 0, q = 0, alpha = 0;
    long long eta = 1, beta = 0, output_bits = 32;
    long long trials = 1;
    std::uint64_t seed = 0;
    std::string demands, subsets, starts, queries;
    std::string transcript_path;
    common_options out;
};

madc::instance_config simulate_config(const simulate_options& o) {
    madc::instance_config c;
    c.model = madc::parse_model(o.model);
    c.reducers = o.reducers;
    c.inner_dim = c.model == madc::model_kind::connect ? o.f : o.q;
    if (c.inner_dim <= 0)
        throw madc::param_error(c.model == madc::model_kind::connect ? "simulate: --f required"
                                                                     : "simulate: --q required");
    c.alpha = o.alpha;
    c.eta = o.eta;
    c.iv_bits = o.beta;
    c.output_bits = o.output_bits;
    c.seed = madc::derive_seed(o.seed, 0x6f7261636c65ull /* "oracle" */);
    return c;
}

madc::round_options simulate_round_options(const simulate_options& o,
                                           const madc::instance_config& c) {
    madc::round_options r;
    if (!o.demands.empty() || !o.subsets.empty() || !o.starts.empty()) {
        if (o.demands.empty())
            throw madc::param_error("simulate: fixed attachments need --demands too");
        std::vector<int> demands = parse_int_list(o.demands, "--demands");
        if (static_cast<int>(demands.size()) != c.reducers)
            throw madc::param_error("simulate: need one demand per reducer");
        std::vector<std::vector<int>> subsets;
        std::vector<int> starts;
        if (c.model == madc::model_kind::connect) {
            if (o.subsets.empty())
                throw madc::param_error("simulate: --demands needs --subsets on this model");
            subsets = parse_groups(o.subsets, "--subsets");
            if (static_cast<int>(subsets.size()) != c.reducers)
                throw madc::param_error("simulate: need one subset per reducer");
        } else {
            if (o.starts.empty())
                throw madc::param_error("simulate: --demands needs --starts on this model");
            starts = parse_int_list(o.starts, "--starts");
            if (static_cast<int>(starts.size()) != c.reducers)
                throw madc::param_error("simulate: need one start per reducer");
        }
        for (int k = 0; k < c.reducers; ++k) {
            madc::reducer_private p;
            p.demand = demands[static_cast<std::size_t>(k)];
            if (c.model == madc::model_kind::connect)
                p.subset = subsets[static_cast<std::size_t>(k)];
            else
                p.start = starts[static_cast<std::size_t>(k)];
            r.privates.push_back(std::move(p));
        }
    }
    if (!o.queries.empty()) {
        r.preset_queries = parse_groups(o.queries, "--queries");
        if (static_cast<int>(r.preset_queries.size()) != c.reducers)
            throw madc::param_error("simulate: need one query per reducer");
    }
    return r;
}

void dump_transcript(const madc::round_result& round, const std::string& path,
                     const std::string& out_dir) {
    sink out(path, out_dir);
    const madc::madc_instance& inst = round.instance;
    out.stream() << "# model=" << madc::model_name(inst.config.model)
                 << " reducers=" << inst.config.reducers << " inner=" << inst.config.inner_dim
                 << " alpha=" << inst.config.alpha << " eta=" << inst.config.eta
                 << " beta=" << inst.beta << "\n";
    out.stream() << "# packet ids are function:block:row:superscript\n";
    for (const auto& e : round.transcript.entries) {
        out.stream() << "sender=" << e.sender << " label=" << e.label
                     << " bits=" << e.payload.size() << " payload=" << e.payload.to_hex()
                     << " packets=";
        for (std::size_t i = 0; i < e.packets.size(); ++i)
            out.stream() << (i ? "," : "") << packet_str(e.packets[i]);
        out.stream() << "\n";
    }
    out.done();
}

int cmd_simulate(const simulate_options& o) {
    madc::instance_config config = simulate_config(o);

    sink out(o.out.out, o.out.out_dir);
    json rows = json::array();
    bool all_ok = true;
    for (long long t = 0; t < o.trials; ++t) {
        std::uint64_t round_seed = madc::derive_seed(o.seed, 0x726e64ull, static_cast<std::uint64_t>(t));
        bool decode_ok = true;
        std::string failure;
        madc::round_options trial_opts = simulate_round_options(o, config);
        std::optional<madc::round_result> round;
        try {
            round = madc::run_round(config, trial_opts, round_seed);
        } catch (const madc::protocol_error& e) {
            decode_ok = false;
            failure = e.what();
        }
        bool match = round && round->loads.matches;
        all_ok = all_ok && decode_ok && match;
        json row{{"trial", t}, {"round_seed", round_seed}};
        if (round) {
            const madc::madc_instance& inst = round->instance;
            row["params"] = format_params(madc::inspect_pda(inst.extended));
            row["functions"] = inst.functions;
            row["labels"] = inst.inner_params.s;
            row["files"] = inst.total_files;
            row["beta"] = inst.beta;
            row["demands"] = inst.demands;
            row["columns"] = inst.private_cols;
            row["total_bits"] = round->loads.total_bits;
            row["l_measured"] = fraction(round->loads.l_measured);
            row["l_measured_decimal"] = decimal(round->loads.l_measured);
            row["l_formula"] = fraction(round->loads.l_formula);
            row["r_measured"] = fraction(round->loads.r_measured);
        } else {
            row["error"] = failure;
        }
        row["decode_ok"] = decode_ok;
        row["loads_match"] = match;
        rows.push_back(row);
        if (t == 0 && round && !o.transcript_path.empty())
            dump_transcript(*round, o.transcript_path, o.out.out_dir);
    }

    if (o.out.format == "json") {
        json report{{"command", "simulate"},
                    {"model", o.model},
                    {"reducers", config.reducers},
                    {"inner", config.inner_dim},
                    {"alpha", config.alpha},
                    {"eta", config.eta},
                    {"output_bits", config.output_bits},
                    {"seed", o.seed},
                    {"trials", rows},
                    {"all_ok", all_ok}};
        out.stream() << report.dump(2) << "\n";
    } else {
        out.stream() << "trial,model,reducers,inner,alpha,eta,params,beta,functions,labels,files,"
                        "round_seed,total_bits,l_measured,l_measured_decimal,l_formula,"
                        "r_measured,decode_ok,loads_match\n";
        for (const auto& r : rows) {
            out.stream() << r["trial"] << "," << o.model << "," << config.reducers << ","
                         << config.inner_dim << "," << config.alpha << "," << config.eta << ",";
            if (r.contains("beta"))
                out.stream() << "\"" << r["params"].get<std::string>() << "\"," << r["beta"]
                             << "," << r["functions"] << "," << r["labels"] << "," << r["files"];
            else
                out.stream() << ",,,,";
            out.stream() << "," << r["round_seed"] << ",";
            if (r.contains("total_bits"))
                out.stream() << r["total_bits"] << "," << r["l_measured"].get<std::string>()
                             << "," << r["l_measured_decimal"].get<std::string>() << ","
                             << r["l_formula"].get<std::string>() << ","
                             << r["r_measured"].get<std::string>();
            else
                out.stream() << ",,,,";
            out.stream() << "," << (r["decode_ok"].get<bool>() ? "true" : "false") << ","
                         << (r["loads_match"].get<bool>() ? "true" : "false") << "\n";
        }
    }
    out.done();
    return all_ok ? 0 : 1;
}

// -------------------------------------------------------------------- audit

struct audit_options {
    int functions = 0;
    int reducers = 2;
    std::string mode = "auto";
    long long trials = 100000;
    std::uint64_t seed = 0;
    common_options out;
};

int cmd_audit(const audit_options& o) {
    if (o.functions < 1) throw madc::param_error("audit: --q must be positive");
    std::string mode = o.mode;
    if (mode == "auto") mode = o.functions <= 6 ? "exact" : "sampling";

    sink out(o.out.out, o.out.out_dir);
    bool pass = true;
    json report{{"command", "audit"},
                {"mode", mode},
                {"functions", o.functions},
                {"reducers", o.reducers}};
    json rows = json::array();

    if (mode == "exact") {
        if (o.functions > 6)
            throw madc::param_error("audit: exact enumeration is limited to Q <= 6");
        madc::independence_report rep = madc::audit_independence(o.functions, o.reducers);
        std::vector<madc::query_distribution> dists;
        for (int d = 1; d <= o.functions; ++d)
            dists.push_back(madc::exact_query_distribution(o.functions, d));
        for (int d1 = 1; d1 <= o.functions; ++d1)
            for (int d2 = d1 + 1; d2 <= o.functions; ++d2) {
                madc::rational tv = madc::tv_distance(dists[static_cast<std::size_t>(d1 - 1)],
                                                      dists[static_cast<std::size_t>(d2 - 1)]);
                rows.push_back({{"demand_a", d1}, {"demand_b", d2}, {"tv", fraction(tv)}});
            }
        report["pairs"] = rows;
        report["max_tv"] = fraction(rep.max_tv);
        report["uniform_gap"] = fraction(rep.uniform_gap);
        report["contexts"] = rep.contexts;
    } else {
        if (mode != "sampling") throw madc::param_error("audit: unknown mode " + mode);
        double threshold = madc::chi_square_threshold_999(o.functions);
        for (int d = 1; d <= o.functions; ++d) {
            double stat = madc::empirical_query_check(
                o.functions, d, o.trials, madc::derive_seed(o.seed, static_cast<std::uint64_t>(d)));
            bool under = stat < threshold;
            pass = pass && under;
            rows.push_back({{"demand", d},
                            {"trials", o.trials},
                            {"statistic", stat},
                            {"threshold", threshold},
                            {"pass", under}});
        }
        report["seed"] = o.seed;
        report["checks"] = rows;
    }
    report["pass"] = pass;

    if (o.out.format == "json") {
        out.stream() << report.dump(2) << "\n";
    } else if (mode == "exact") {
        out.stream() << "mode,functions,reducers,demand_a,demand_b,tv,pass\n";
        for (const auto& r : rows)
            out.stream() << "exact," << o.functions << "," << o.reducers << "," << r["demand_a"]
                         << "," << r["demand_b"] << "," << r["tv"].get<std::string>() << ","
                         << "true\n";
    } else {
        out.stream() << "mode,functions,demand,trials,seed,statistic,threshold,pass\n";
        for (const auto& r : rows) {
            char stat_buf[64], thr_buf[64];
            std::snprintf(stat_buf, sizeof(stat_buf), "%.6f", r["statistic"].get<double>());
            std::snprintf(thr_buf, sizeof(thr_buf), "%.6f", r["threshold"].get<double>());
            out.stream() << "sampling," << o.functions << "," << r["demand"] << ","
                         << r["trials"] << "," << o.seed << "," << stat_buf << "," << thr_buf
                         << "," << (r["pass"].get<bool>() ? "true" : "false") << "\n";
        }
    }
    out.done();
    if (mode == "exact") std::cerr << "exact audit pass, max tv 0\n";
    return pass ? 0 : 1;
}

// -------------------------------------------------------------------- sweep

struct sweep_options {
    std::string model;
    std::string reducers_range = "2..4";
    std::string inner_range;
    std::string alphas = "all";
    long long eta = 1, beta = 0;
    long long trials = 100;
    std::uint64_t seed = 0;
    int jobs = 0;
    common_options out;
};

struct sweep_point {
    madc::instance_config config;
    long long trials = 0;
    std::uint64_t seed = 0;

    bool done = false;
    bool decode_ok = true;
    bool loads_match = true;
    std::string failure;
    madc::load_report loads;
    int functions = 0, labels = 0;
    long long files = 0, beta = 0;
};

void run_sweep_point(sweep_point& pt) {
    for (long long t = 0; t < pt.trials; ++t) {
        std::uint64_t round_seed =
            madc::derive_seed(pt.seed, 0x726e64ull, static_cast<std::uint64_t>(t));
        try {
            madc::round_result round = madc::run_round(pt.config, {}, round_seed);
            pt.loads = round.loads;
            pt.loads_match = pt.loads_match && round.loads.matches;
            if (t == 0) {
                pt.functions = round.instance.functions;
                pt.labels = round.instance.inner_params.s;
                pt.files = round.instance.total_files;
                pt.beta = round.instance.beta;
            }
        } catch (const madc::protocol_error& e) {
            pt.decode_ok = false;
            pt.failure = e.what();
            break;
        }
    }
    pt.done = true;
}

int cmd_sweep(const sweep_options& o) {
    madc::model_kind model = madc::parse_model(o.model);
    if (o.inner_range.empty()) throw madc::param_error("sweep: --inner range required");
    std::vector<int> reducer_values = parse_range(o.reducers_range, "--reducers");
    std::vector<int> inner_values = parse_range(o.inner_range, "--inner");

    std::vector<sweep_point> points;
    for (int k : reducer_values)
        for (int inner : inner_values) {
            std::vector<int> alphas = o.alphas == "all"
                                          ? valid_alphas(model, inner)
                                          : parse_range(o.alphas, "--alphas");
            for (int alpha : alphas) {
                if (o.alphas != "all") {
                    auto valid = valid_alphas(model, inner);
                    if (std::find(valid.begin(), valid.end(), alpha) == valid.end()) continue;
                }
                sweep_point pt;
                pt.config.model = model;
                pt.config.reducers = k;
                pt.config.inner_dim = inner;
                pt.config.alpha = alpha;
                pt.config.eta = o.eta;
                pt.config.iv_bits = o.beta;
                pt.config.seed = madc::derive_seed(o.seed, 0x6f7261636c65ull,
                                                   static_cast<std::uint64_t>(k),
                                                   static_cast<std::uint64_t>(inner),
                                                   static_cast<std::uint64_t>(alpha));
                pt.seed = madc::derive_seed(o.seed, 0x7074ull, static_cast<std::uint64_t>(k),
                                            static_cast<std::uint64_t>(inner),
                                            static_cast<std::uint64_t>(alpha));
                pt.trials = o.trials;
                points.push_back(pt);
            }
        }
    if (points.empty()) throw madc::param_error("sweep: no valid parameter points");

    unsigned jobs = o.jobs > 0 ? static_cast<unsigned>(o.jobs)
                               : std::max(1u, std::thread::hardware_concurrency() / 2);
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(points.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= points.size()) return;
                run_sweep_point(points[i]);
            }
        });
    for (auto& w : workers) w.join();

    bool all_ok = true;
    json rows = json::array();
    for (const sweep_point& pt : points) {
        bool ok = pt.decode_ok && pt.loads_match;
        all_ok = all_ok && ok;
        json row{{"model", o.model},
                 {"reducers", pt.config.reducers},
                 {"inner", pt.config.inner_dim},
                 {"alpha", pt.config.alpha},
                 {"eta", pt.config.eta},
                 {"beta", pt.beta},
                 {"functions", pt.functions},
                 {"labels", pt.labels},
                 {"files", pt.files},
                 {"trials", pt.trials},
                 {"total_bits", pt.loads.total_bits},
                 {"l_measured", fraction(pt.loads.l_measured)},
                 {"l_measured_decimal", decimal(pt.loads.l_measured)},
                 {"l_formula", fraction(pt.loads.l_formula)},
                 {"r_measured", fraction(pt.loads.r_measured)},
                 {"decode_ok", pt.decode_ok},
                 {"loads_match", pt.loads_match}};
        if (!pt.failure.empty()) row["error"] = pt.failure;
        rows.push_back(row);
    }

    sink out(o.out.out, o.out.out_dir);
    if (o.out.format == "json") {
        json report{{"command", "sweep"}, {"model", o.model},   {"eta", o.eta},
                    {"trials", o.trials}, {"seed", o.seed},     {"points", rows},
                    {"count", points.size()}, {"all_ok", all_ok}};
        out.stream() << report.dump(2) << "\n";
    } else {
        out.stream() << "model,reducers,inner,alpha,eta,beta,functions,labels,files,trials,"
                        "total_bits,l_measured,l_measured_decimal,l_formula,r_measured,"
                        "decode_ok,loads_match\n";
        for (const auto& r : rows)
            out.stream() << r["model"].get<std::string>() << "," << r["reducers"] << ","
                         << r["inner"] << "," << r["alpha"] << "," << r["eta"] << ","
                         << r["beta"] << "," << r["functions"] << "," << r["labels"] << ","
                         << r["files"] << "," << r["trials"] << "," << r["total_bits"] << ","
                         << r["l_measured"].get<std::string>() << ","
                         << r["l_measured_decimal"].get<std::string>() << ","
                         << r["l_formula"].get<std::string>() << ","
                         << r["r_measured"].get<std::string>() << ","
                         << (r["decode_ok"].get<bool>() ? "true" : "false") << ","
                         << (r["loads_match"].get<bool>() ? "true" : "false") << "\n";
    }
    out.done();
    std::cerr << "swept " << points.size() << " points, "
              << (all_ok ? "all passed" : "FAILURES present") << "\n";
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"placement delivery arrays and the private multi-access shuffle"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read defaults from a TOML/INI config file");

    common_options global;
    const char* env_dir = std::getenv("MADC_OUT_DIR");
    if (env_dir) global.out_dir = env_dir;
    app.add_option("--out-dir", global.out_dir,
                   "directory for relative output paths (env MADC_OUT_DIR)");

    construct_options c;
    CLI::App* construct = app.add_subcommand("construct", "build an array and print its profile");
    construct->add_option("--model", c.model, "connect or cyclic")->required();
    construct->add_option("--f", c.f, "inner dimension (connect)");
    construct->add_option("--q", c.q, "inner dimension (cyclic)");
    construct->add_option("--alpha", c.alpha, "attachment width")->required();
    construct->add_option("--k", c.k, "number of blocks; 0 emits the base array")
        ->capture_default_str();
    construct->add_flag("--transpose", c.transposed, "transpose the base array (only with --k 0)");
    add_output_options(construct, c.out);

    verify_options v;
    CLI::App* verify = app.add_subcommand("verify", "check a stored array or the whole families");
    verify->add_option("path", v.path, "array text file");
    verify->add_flag("--families", v.families, "verify the construction families instead");
    verify->add_option("--f-max", v.f_max, "largest inner dimension for the subset family")
        ->capture_default_str();
    verify->add_option("--q-max", v.q_max, "largest inner dimension for the cyclic family")
        ->capture_default_str();
    add_output_options(verify, v.out);

    simulate_options s;
    CLI::App* simulate = app.add_subcommand("simulate", "run full protocol rounds at one point");
    simulate->add_option("--model", s.model, "connect or cyclic")->required();
    simulate->add_option("--k", s.reducers, "number of reducers")->required();
    simulate->add_option("--f", s.f, "inner dimension (connect)");
    simulate->add_option("--q", s.q, "inner dimension (cyclic)");
    simulate->add_option("--alpha", s.alpha, "attachment width")->required();
    simulate->add_option("--eta", s.eta, "files per batch")->capture_default_str();
    simulate->add_option("--beta", s.beta, "bits per intermediate value, 0 = 8*(K-1)")
        ->capture_default_str();
    simulate->add_option("--output-bits", s.output_bits, "reduce output size")
        ->capture_default_str();
    simulate->add_option("--trials", s.trials, "rounds to run")->capture_default_str();
    simulate->add_option("--seed", s.seed, "base seed")->capture_default_str();
    simulate->add_option("--demands", s.demands, "fixed demands, comma separated");
    simulate->add_option("--subsets", s.subsets, "fixed attachments `1,2;2,3;...` (connect)");
    simulate->add_option("--starts", s.starts, "fixed start rows, comma separated (cyclic)");
    simulate->add_option("--queries", s.queries, "preset queries `1,3,2;...`");
    simulate->add_option("--transcript", s.transcript_path, "dump the first trial's transcript");
    add_output_options(simulate, s.out);

    audit_options a;
    CLI::App* audit = app.add_subcommand("audit", "check query privacy");
    audit->add_option("--q", a.functions, "number of functions")->required();
    audit->add_option("--reducers", a.reducers, "reducer count for the report")
        ->capture_default_str();
    audit->add_option("--mode", a.mode, "exact, sampling or auto")
        ->check(CLI::IsMember({"auto", "exact", "sampling"}))
        ->capture_default_str();
    audit->add_option("--trials", a.trials, "draws per demand (sampling)")->capture_default_str();
    audit->add_option("--seed", a.seed, "sampling seed")->capture_default_str();
    add_output_options(audit, a.out);

    sweep_options w;
    CLI::App* sweep = app.add_subcommand("sweep", "run rounds across a parameter grid");
    sweep->add_option("--model", w.model, "connect or cyclic")->required();
    sweep->add_option("--reducers", w.reducers_range, "range `2..6`, list `2,4` or single value")
        ->capture_default_str();
    sweep->add_option("--inner", w.inner_range, "inner dimension range")->required();
    sweep->add_option("--alphas", w.alphas, "`all` or a range of widths")->capture_default_str();
    sweep->add_option("--eta", w.eta, "files per batch")->capture_default_str();
    sweep->add_option("--beta", w.beta, "bits per intermediate value, 0 = 8*(K-1)")
        ->capture_default_str();
    sweep->add_option("--trials", w.trials, "rounds per point")->capture_default_str();
    sweep->add_option("--seed", w.seed, "base seed")->capture_default_str();
    sweep->add_option("--jobs", w.jobs, "worker threads, 0 = auto")->capture_default_str();
    add_output_options(sweep, w.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    c.out.out_dir = v.out.out_dir = s.out.out_dir = a.out.out_dir = w.out.out_dir = global.out_dir;
    try {
        if (construct->parsed()) return cmd_construct(c);
        if (verify->parsed()) return cmd_verify(v);
        if (simulate->parsed()) return cmd_simulate(s);
        if (audit->parsed()) return cmd_audit(a);
        if (sweep->parsed()) return cmd_sweep(w);
    } catch (const madc::pda_violation& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const madc::protocol_error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const madc::privacy_violation& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const madc::parse_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const madc::param_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const madc::overflow_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const madc::error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
