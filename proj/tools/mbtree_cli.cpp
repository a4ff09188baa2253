// Command-line front end: growth, exact tables, oracle checks, Monte-Carlo suites, densities.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mbtree/mbtree.hpp"

using namespace mbtree;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStatFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numeric flag as typed: "p/q" (or an integer) is exact, anything with a '.' or exponent is float.
struct Number {
    std::string text;
    bool exact() const { return text.find_first_of(".eE") == std::string::npos; }
    Rational rational() const {
        if (!exact()) throw UsageError("'" + text + "' is not an exact rational (use p/q)");
        try {
            return parse_rational(text);
        } catch (const std::exception&) {
            throw UsageError("cannot parse '" + text + "' as p/q");
        }
    }
    double real() const {
        if (exact()) return to_double(rational());
        try {
            std::size_t pos = 0;
            double v = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw UsageError("cannot parse '" + text + "' as a number");
        }
    }
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("MBTREE_SEED")) {
        try {
            std::size_t pos = 0;
            unsigned long long v = std::stoull(env, &pos);
            if (pos == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw UsageError("MBTREE_SEED is not an unsigned 64-bit integer");
    }
    return 1;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw UsageError("cannot open output file " + out_path);
    f << text;
}

std::string partition_text(const std::vector<int>& parts) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? " " : "") + std::to_string(parts[i]);
    return s;
}

template <class T>
std::string scalar_text(const T& x) {
    if constexpr (is_exact_v<T>) {
        return format_rational(x);
    } else {
        std::ostringstream o;
        o.precision(17);
        o << x;
        return o.str();
    }
}

json report_json(const SuiteReport& rep) {
    json j;
    j["config"] = json::object();
    for (const auto& [k, v] : rep.config) j["config"][k] = v;
    j["stats"] = json::array();
    for (const auto& s : rep.stats) {
        json e;
        e["name"] = s.name;
        e["estimate"] = s.estimate;
        e["stderr"] = s.stderr_;
        e["target"] = s.target;
        if (s.p_value >= 0)
            e["p_value"] = s.p_value;
        else
            e["p_value"] = nullptr;
        e["pass"] = s.pass;
        j["stats"].push_back(e);
    }
    j["pass"] = rep.all_pass();
    return j;
}

// ---------------------------------------------------------------------------

struct GrowOpts {
    Number alpha, gamma;
    std::optional<Number> c;
    int n = 0;
    std::optional<std::uint64_t> seed;
    bool lengths = false;
    std::string out;
};

int run_grow(const GrowOpts& o) {
    if (o.n < 1) throw std::invalid_argument("n must be at least 1");
    RngStream rng(resolve_seed(o.seed));
    LabelledTree t;
    if (o.c) {
        double a = o.alpha.real(), c = o.c->real();
        check_colour_params(a, c);
        if (o.n == 1) {
            t = LabelledTree::single_leaf();
        } else {
            ColouredTree tc = ColouredTree::cherry();
            while (tc.tree.leaf_count() < o.n) tc = colour_grow_step(tc, a, c, rng);
            t = crush(tc);
        }
    } else {
        t = grow(o.n, ModelParams<double>(o.alpha.real(), o.gamma.real()), rng);
    }
    std::string text = o.lengths ? t.serialize(std::vector<long>(t.node_count(), 1)) : t.serialize();
    emit(text + "\n", o.out);
    return kExitOk;
}

struct TableOpts {
    Number alpha, gamma;
    int n = 0;
    std::string kind = "seq";
    std::string out;
};

template <class T>
int split_table(const T& alpha, const T& gamma, const TableOpts& o) {
    if (o.n < 2) throw std::invalid_argument("n must be at least 2");
    std::ostringstream csv;
    csv << "partition,probability\n";
    if (o.kind == "seq") {
        auto d = split_distribution(ModelParams<T>(alpha, gamma), o.n);
        for (auto it = d.entries.rbegin(); it != d.entries.rend(); ++it)
            csv << partition_text(it->first.parts) << "," << scalar_text(it->second) << "\n";
    } else if (o.kind == "pdstar") {
        NormConstants<T> nc(alpha, gamma);
        auto parts = integer_partitions(o.n, 2);
        for (auto& p : parts) csv << partition_text(p) << "," << scalar_text(eppf_to_split(p, eppf_pdstar(alpha, gamma, p, &nc))) << "\n";
    } else if (o.kind == "dec") {
        // row n of the decrement matrix with (alpha, theta) = (alpha, gamma)
        for (int m = 1; m <= o.n; ++m) csv << m << "," << scalar_text(decrement(alpha, gamma, o.n, m)) << "\n";
    } else {
        throw UsageError("unknown --kind " + o.kind);
    }
    emit(csv.str(), o.out);
    return kExitOk;
}

int run_split_table(const TableOpts& o) {
    if (o.alpha.exact() && o.gamma.exact()) return split_table(o.alpha.rational(), o.gamma.rational(), o);
    return split_table(o.alpha.real(), o.gamma.real(), o);
}

struct ConsistencyOpts {
    Number alpha, gamma;
    int n = 8;
    double tol = 1e-12;
    std::string out;
};

template <class T>
int consistency(const T& alpha, const T& gamma, const ConsistencyOpts& o) {
    if (o.n < 3) throw std::invalid_argument("n must be at least 3");
    ModelParams<T> m(alpha, gamma);
    std::ostringstream csv;
    csv << "n,del3,del4\n";
    bool ok = true;
    auto bad = [&](const T& r) {
        if constexpr (is_exact_v<T>)
            return r != T(0);
        else
            return !(r <= o.tol);
    };
    for (int n = 3; n <= o.n; ++n) {
        auto r = check_sampling_consistency(m, n);
        csv << n << "," << scalar_text(r.del3) << "," << scalar_text(r.del4) << "\n";
        ok = ok && !bad(r.del3) && !bad(r.del4);
    }
    emit(csv.str(), o.out);
    return ok ? kExitOk : kExitStatFail;
}

int run_consistency(const ConsistencyOpts& o) {
    if (o.alpha.exact() && o.gamma.exact()) return consistency(o.alpha.rational(), o.gamma.rational(), o);
    return consistency(o.alpha.real(), o.gamma.real(), o);
}

struct OracleOpts {
    Number alpha, gamma;
    int n = 4;
    int bound = kOracleDefaultBound;
    std::string verify = "all";
    bool table = true;
    std::string out;
};

int run_oracle(const OracleOpts& o) {
    ModelParams<Rational> p(o.alpha.rational(), o.gamma.rational());
    std::set<std::string> checks;
    if (o.verify == "all")
        checks = {"markov", "exchangeability", "spinal", "first-split", "sampling", "strong"};
    else if (o.verify != "none") {
        std::stringstream ss(o.verify);
        for (std::string item; std::getline(ss, item, ',');) {
            static const std::set<std::string> known = {"markov", "exchangeability", "spinal",
                                                        "first-split", "sampling", "strong"};
            if (!known.count(item)) throw UsageError("unknown check '" + item + "'");
            checks.insert(item);
        }
    }
    ExactLaw law = exact_law(p, o.n, o.bound);
    json j;
    j["config"] = {{"alpha", format_rational(p.alpha)}, {"gamma", format_rational(p.gamma)},
                   {"n", o.n}, {"bound", o.bound}, {"verify", o.verify}};
    j["total"] = format_rational(law.total());
    if (o.table) {
        j["trees"] = json::array();
        for (const auto& [s, pr] : law.trees()) j["trees"].push_back({{"tree", s}, {"probability", format_rational(pr)}});
        j["shapes"] = json::array();
        for (const auto& [s, pr] : law.shape_law()) j["shapes"].push_back({{"shape", s}, {"probability", format_rational(pr)}});
    }
    json res = json::object();
    bool ok = law.total() == 1;
    auto put = [&](const std::string& key, const Rational& r) {
        res[key] = format_rational(r);
        ok = ok && r == 0;
    };
    if (checks.count("markov") && o.n >= 2) put("markov_branching", verify_markov_branching(law));
    if (checks.count("first-split") && o.n >= 2) {
        std::map<SplitPartition, Rational> formula;
        for (auto& [part, q] : split_distribution(p, o.n).entries) formula[part] = q;
        put("first_split", max_abs_diff(law.first_split_law(), formula));
    }
    if (checks.count("spinal") && o.n >= 2) {
        auto s = verify_spinal(law, p);
        put("spinal_composition", s.composition);
        put("spinal_joint", s.joint);
    }
    if (checks.count("sampling") && o.n >= 2) put("sampling_consistency", max_abs_diff(deleted_shape_law(law), law.shape_law(o.n - 1)));
    j["residuals"] = res;
    if (checks.count("exchangeability") && o.n >= 3) j["exchangeable"] = verify_exchangeability(law);
    if (checks.count("strong") && o.n >= 3) {
        // A property of the model rather than a check that must hold: reported, not gated on.
        auto sc = strong_consistency_joint(p, o.n, o.bound);
        j["strong_consistency"] = {{"residual", format_rational(sc.residual)}, {"holds", sc.residual == 0}};
    }
    j["pass"] = ok;
    emit(j.dump(2) + "\n", o.out);
    return ok ? kExitOk : kExitStatFail;
}

struct CrushOpts {
    Number alpha, c;
    int n = 5;
    int bound = kOracleDefaultBound;
    std::string out;
};

int run_crush(const CrushOpts& o) {
    Rational a = o.alpha.rational(), c = o.c.rational();
    check_colour_params(a, c);
    Rational g = a * (Rational(1) - c);
    ModelParams<Rational> p(a, g);
    ExactLaw lc = exact_coloured_law(a, c, o.n, o.bound);
    ExactLaw lp = exact_law(p, o.n, o.bound);
    json j;
    j["config"] = {{"alpha", format_rational(a)}, {"c", format_rational(c)}, {"n", o.n}};
    j["gamma"] = format_rational(g);
    j["levels"] = json::array();
    bool ok = true;
    for (int m = 1; m <= o.n; ++m) {
        Rational r = max_abs_diff(lc.levels[m], lp.levels[m]);
        j["levels"].push_back({{"n", m}, {"residual", format_rational(r)}});
        ok = ok && r == 0;
    }
    j["pass"] = ok;
    emit(j.dump(2) + "\n", o.out);
    return ok ? kExitOk : kExitStatFail;
}

struct DensityOpts {
    std::string kind = "nu_sb";
    Number alpha;
    std::optional<Number> gamma, theta;
    double from = 0.1, to = 0.9;
    int points = 9;
    std::string out;
};

int run_density(const DensityOpts& o) {
    if (o.points < 1) throw std::invalid_argument("points must be at least 1");
    const double a = o.alpha.real();
    auto need = [](const std::optional<Number>& x, const char* name) {
        if (!x) throw UsageError(std::string("--") + name + " is required for this density");
        return x->real();
    };
    std::function<double(double)> f;
    if (o.kind == "gemstar") {
        double th = need(o.theta, "theta");
        f = [=](double x) { return gem_star_density(a, th, std::span<const double>(&x, 1)); };
    } else if (o.kind == "nu_sb") {
        double g = need(o.gamma, "gamma");
        f = [=](double x) { return nu_sb_density(a, g, x); };
    } else if (o.kind == "binary") {
        double g = need(o.gamma, "gamma");
        f = [=](double x) { return binary_density(a, g, x); };
    } else if (o.kind == "alpha1") {
        double g = need(o.gamma, "gamma");
        if (a != 1.0) throw std::invalid_argument("alpha1 density needs alpha = 1");
        f = [=](double x) { return alpha1_density(g, x).density; };
    } else if (o.kind == "levy") {
        double g = need(o.gamma, "gamma");
        f = [=](double x) { return levy_density(a, g, x); };
    } else if (o.kind == "levy_tail") {
        double g = need(o.gamma, "gamma");
        f = [=](double x) { return levy_tail(a, g, x); };
    } else {
        throw UsageError("unknown --kind " + o.kind);
    }
    std::ostringstream csv;
    csv.precision(17);
    csv << "x,value\n";
    for (int i = 0; i < o.points; ++i) {
        double x = o.points == 1 ? o.from : o.from + (o.to - o.from) * i / (o.points - 1);
        csv << x << "," << f(x) << "\n";
    }
    emit(csv.str(), o.out);
    return kExitOk;
}

int finish_report(const SuiteReport& rep, const std::string& out) {
    emit(report_json(rep).dump(2) + "\n", out);
    return rep.all_pass() ? kExitOk : kExitStatFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Alpha-gamma Markov branching trees: samplers, exact laws and limit checks"};
    app.require_subcommand(1);

    GrowOpts grow_o;
    auto* g = app.add_subcommand("grow", "Sample T_n and print it in the text tree format");
    g->add_option("--alpha", grow_o.alpha.text, "alpha (p/q or decimal)")->required();
    g->add_option("--gamma", grow_o.gamma.text, "gamma (p/q or decimal)");
    g->add_option("--c", grow_o.c, "grow the coloured tree with red probability c and print its crushed form");
    g->add_option("--n", grow_o.n, "number of leaves")->required();
    g->add_option("--seed", grow_o.seed, "seed (falls back to MBTREE_SEED)");
    g->add_flag("--lengths", grow_o.lengths, "append unit edge lengths");
    g->add_option("-o,--out", grow_o.out, "output file");

    TableOpts tab_o;
    auto* st = app.add_subcommand("split-table", "Splitting rule q(n_1,...,n_k) as CSV");
    st->add_option("--alpha", tab_o.alpha.text)->required();
    st->add_option("--gamma", tab_o.gamma.text, "gamma (theta for --kind dec)")->required();
    st->add_option("--n", tab_o.n)->required();
    st->add_option("--kind", tab_o.kind, "seq | pdstar | dec")->check(CLI::IsMember({"seq", "pdstar", "dec"}));
    st->add_option("-o,--out", tab_o.out);

    ConsistencyOpts con_o;
    auto* cc = app.add_subcommand("check-consistency", "Sampling-consistency residuals for n = 3..N");
    cc->add_option("--alpha", con_o.alpha.text)->required();
    cc->add_option("--gamma", con_o.gamma.text)->required();
    cc->add_option("--n", con_o.n, "largest n");
    cc->add_option("--tol", con_o.tol, "float-mode tolerance");
    cc->add_option("-o,--out", con_o.out);

    OracleOpts or_o;
    auto* orc = app.add_subcommand("oracle", "Exact law of T_n with verification residuals (JSON)");
    orc->add_option("--alpha", or_o.alpha.text, "alpha as p/q")->required();
    orc->add_option("--gamma", or_o.gamma.text, "gamma as p/q")->required();
    orc->add_option("--n", or_o.n)->required();
    orc->add_option("--bound", or_o.bound, "largest n allowed")->check(CLI::Range(1, kOracleMaxBound));
    orc->add_option("--verify", or_o.verify,
                    "all | none | comma list of markov,exchangeability,spinal,first-split,sampling,strong");
    orc->add_flag("!--no-table", or_o.table, "omit the law tables");
    orc->add_option("-o,--out", or_o.out);

    CrushOpts cr_o;
    auto* crc = app.add_subcommand("crush-compare", "Exact crushed coloured law vs the alpha-gamma law");
    crc->add_option("--alpha", cr_o.alpha.text)->required();
    crc->add_option("--c", cr_o.c.text)->required();
    crc->add_option("--n", cr_o.n);
    crc->add_option("--bound", cr_o.bound)->check(CLI::Range(1, kOracleMaxBound));
    crc->add_option("-o,--out", cr_o.out);

    DensityOpts den_o;
    auto* den = app.add_subcommand("density", "Evaluate a density on a uniform grid (CSV)");
    den->add_option("--kind", den_o.kind, "gemstar | nu_sb | binary | alpha1 | levy | levy_tail")
        ->check(CLI::IsMember({"gemstar", "nu_sb", "binary", "alpha1", "levy", "levy_tail"}));
    den->add_option("--alpha", den_o.alpha.text)->required();
    den->add_option("--gamma", den_o.gamma);
    den->add_option("--theta", den_o.theta);
    den->add_option("--from", den_o.from);
    den->add_option("--to", den_o.to);
    den->add_option("--points", den_o.points);
    den->add_option("-o,--out", den_o.out);

    CrpSuiteConfig crp_c;
    std::optional<std::uint64_t> crp_seed;
    std::string crp_out;
    auto* mcc = app.add_subcommand("mc-crp", "CRP table-count scaling and Mittag-Leffler moments (JSON)");
    mcc->add_option("--alpha", crp_c.alpha);
    mcc->add_option("--theta", crp_c.theta);
    mcc->add_option("--n", crp_c.n);
    mcc->add_option("--replicates", crp_c.replicates)->check(CLI::PositiveNumber);
    mcc->add_option("--ml-samples", crp_c.ml_samples)->check(CLI::PositiveNumber);
    mcc->add_option("--se-mult", crp_c.se_mult);
    mcc->add_option("--seed", crp_seed);
    mcc->add_option("--threads", crp_c.threads)->check(CLI::PositiveNumber);
    mcc->add_option("-o,--out", crp_out);

    ReducedSuiteConfig red_c;
    std::optional<std::uint64_t> red_seed;
    std::string red_out;
    auto* mcr = app.add_subcommand("mc-reduced", "Reduced-tree limit laws given the shape of T_k (JSON)");
    mcr->add_option("--alpha", red_c.alpha);
    mcr->add_option("--gamma", red_c.gamma);
    mcr->add_option("--k", red_c.k);
    mcr->add_option("--n", red_c.n);
    mcr->add_option("--replicates", red_c.replicates)->check(CLI::PositiveNumber);
    mcr->add_option("--shape", red_c.shape, "target shape code of T_k, e.g. ((oo)o)");
    mcr->add_option("--ks-level", red_c.ks_level);
    mcr->add_option("--se-mult", red_c.se_mult);
    mcr->add_option("--seed", red_seed);
    mcr->add_option("--threads", red_c.threads)->check(CLI::PositiveNumber);
    mcr->add_option("-o,--out", red_out);

    SpineSuiteConfig sp_c;
    std::optional<std::uint64_t> sp_seed;
    std::string sp_out;
    auto* mcs = app.add_subcommand("mc-spine", "First spine frequency law and its gamma-independence (JSON)");
    mcs->add_option("--alpha", sp_c.alpha);
    mcs->add_option("--gamma", sp_c.gamma);
    mcs->add_option("--gamma2", sp_c.gamma2);
    mcs->add_option("--n", sp_c.n);
    mcs->add_option("--replicates", sp_c.replicates)->check(CLI::PositiveNumber);
    mcs->add_option("--ks-level", sp_c.ks_level);
    mcs->add_option("--seed", sp_seed);
    mcs->add_option("--threads", sp_c.threads)->check(CLI::PositiveNumber);
    mcs->add_option("-o,--out", sp_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (g->parsed()) {
            if (!grow_o.c && grow_o.gamma.text.empty()) throw UsageError("grow needs --gamma or --c");
            return run_grow(grow_o);
        }
        if (st->parsed()) return run_split_table(tab_o);
        if (cc->parsed()) return run_consistency(con_o);
        if (orc->parsed()) return run_oracle(or_o);
        if (crc->parsed()) return run_crush(cr_o);
        if (den->parsed()) return run_density(den_o);
        if (mcc->parsed()) {
            crp_c.seed = resolve_seed(crp_seed);
            return finish_report(crp_suite(crp_c), crp_out);
        }
        if (mcr->parsed()) {
            red_c.seed = resolve_seed(red_seed);
            return finish_report(reduced_suite(red_c), red_out);
        }
        if (mcs->parsed()) {
            sp_c.seed = resolve_seed(sp_seed);
            return finish_report(spine_suite(sp_c), sp_out);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "out of range: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
