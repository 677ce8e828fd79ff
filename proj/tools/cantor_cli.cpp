#include "cantor/complexity.hpp"
#include "cantor/constructions.hpp"
#include "cantor/encoders.hpp"
#include "cantor/functionals.hpp"
#include "cantor/measures.hpp"
#include "cantor/orders.hpp"
#include "cantor/pcf.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using namespace cantor;

namespace {

constexpr int kParse = 2, kBudget = 3, kInvariant = 4;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Output goes to --out when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw ParseError("cannot write " + path);
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw ParseError("bad " + what + ": " + s);
    return std::stoull(s);
}

// "a..b" or a single number.
std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& s) {
    auto dots = s.find("..");
    if (dots == std::string::npos) {
        auto v = parse_u64(s, "range");
        return {v, v};
    }
    return {parse_u64(s.substr(0, dots), "range"), parse_u64(s.substr(dots + 2), "range")};
}

BitString parse_seed(const std::string& s) {
    if (s == "-") return {};
    if (s.empty() || !is_bitstring(s)) throw ParseError("bad seed: " + s);
    return s;
}

// Seed repeated until n bits are available.
BitString periodic(const BitString& seed, std::size_t n) {
    if (seed.empty()) throw ParseError("empty seed cannot supply source bits");
    BitString z;
    z.reserve(n);
    while (z.size() < n) z.push_back(seed[z.size() % seed.size()]);
    return z;
}

// lebesgue | point:0 | bernoulli:<dyadic> | atoms4:<schedule-spec> | <measuretree file>
MeasureOracle load_measure(const std::string& spec) {
    if (spec == "lebesgue") return measures::lebesgue();
    if (spec == "point:0") return measures::point_mass_zeros();
    if (spec.rfind("bernoulli:", 0) == 0) {
        try {
            return measures::bernoulli(Dyadic::parse(spec.substr(10)));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what());
        }
    }
    if (spec.rfind("atoms4:", 0) == 0) return uniform_atoms_oracle(pcf::parse_schedule(spec.substr(7)));
    std::istringstream in(slurp(spec));
    auto t = read_tree(in);
    if (auto r = tree_validate(t); !r) throw InvariantViolation("measure file " + spec + ": " + r.message);
    return oracle_from_tree(t);
}

// zeros:<n> | ones:<n> | <file of bits, whitespace ignored>
BitString load_sequence(const std::string& spec) {
    if (spec.rfind("zeros:", 0) == 0) return BitString(parse_u64(spec.substr(6), "length"), '0');
    if (spec.rfind("ones:", 0) == 0) return BitString(parse_u64(spec.substr(5), "length"), '1');
    BitString x;
    for (char c : slurp(spec)) {
        if (c == '0' || c == '1') x.push_back(c);
        else if (!std::isspace(static_cast<unsigned char>(c))) throw ParseError("sequence file " + spec + ": bad character");
    }
    return x;
}

Order load_order(const std::string& spec) {
    try {
        return parse_order(spec);
    } catch (const OrderError& e) {
        throw ParseError(e.what());
    }
}

// const:<c> | ref (2^{n+4})
BlockSchedule parse_block_schedule(const std::string& s) {
    if (s == "ref") return machine::gamma_schedule;
    if (s.rfind("const:", 0) == 0) {
        auto c = parse_u64(s.substr(6), "constant");
        return [c](std::uint64_t) { return c; };
    }
    throw ParseError("unknown block schedule: " + s);
}

void write_encoding(std::ostream& os, const BlockEncoding& e) {
    os << "output=" << render_bits(e.output) << "\n";
    os << "blocks=" << e.g.size() << "\n";
    for (std::size_t n = 0; n < e.g.size(); ++n) {
        os << "n=" << n << " g=" << e.g[n];
        if (n < e.ell.size()) os << " ell=" << e.ell[n];
        if (n < e.j.size()) os << " j=" << e.j[n];
        if (n < e.k.size()) os << " k=" << e.k[n];
        os << "\n";
    }
}

struct Options {
    std::string measure = "lebesgue", range = "0..10", out, trace, file, order, order2, seq, mode = "anti-complex";
    std::string pcf = "sched:linear", seed = "0", tree = "delay", schedule = "ref", seeds = "1000..1049";
    std::string tau = "-";
    std::uint64_t depth = 16, budget = 1'000'000, t = 100'000, N = 16, from = 0, c = 0, blocks = 4;
    bool use_ka = false;
};

void run_atoms4(const Options& o) {
    auto p = pcf::parse_schedule(o.pcf);
    auto r = build_uniform_atoms_measure(p, o.depth);
    if (auto v = tree_validate(r.tree); !v) throw InvariantViolation("atoms4 tree: " + v.message);
    if (!o.trace.empty()) {
        Sink tr(o.trace);
        write_trace(tr.os(), r.state);
    }
    Sink out(o.out);
    write_tree(out.os(), r.tree);
}

void run_gamma(const Options& o) {
    auto g = parse_block_schedule(o.schedule);
    auto e = gamma_encode(periodic(parse_seed(o.seed), o.blocks), g, o.blocks);
    if (!encoding_consistent(e)) throw InvariantViolation("gamma: inconsistent encoding");
    if (gamma_decode(e.output, g) != e.source) throw InvariantViolation("gamma: round trip failed");
    Sink out(o.out);
    write_encoding(out.os(), e);
}

void run_xi_ioc(const Options& o) {
    auto p = pcf::parse_schedule(o.pcf);
    // Source needs sum of j_n bits; grow until the encoder stops asking for more.
    BitString seed = parse_seed(o.seed);
    std::size_t len = 64;
    for (;;) {
        try {
            auto e = xi_encode_ioc(periodic(seed, len), p, o.blocks, o.budget);
            if (!encoding_consistent(e)) throw InvariantViolation("xi-ioc: inconsistent encoding");
            Sink out(o.out);
            write_encoding(out.os(), e);
            return;
        } catch (const DepthExceeded&) {
            if (len > o.budget) throw BudgetExhausted("xi-ioc: source longer than budget");
            len *= 2;
        }
    }
}

void run_xi_dim(const Options& o) {
    auto T = tree_stages::parse(o.tree);
    auto e = xi_encode_dim(periodic(parse_seed(o.seed), o.depth + 1), T, o.depth);
    Sink out(o.out);
    out.os() << "output=" << render_bits(e.output) << "\none_tail=" << e.one_tail << "\n";
}

void run_lambda(const Options& o) {
    auto T = tree_stages::parse(o.tree);
    auto p = pcf::parse_schedule(o.pcf);
    auto y = xi_encode_dim(periodic(parse_seed(o.seed), o.depth + 1), T, o.depth);
    auto r = lambda_decode(y.output, xi_dim_tree(T), p, o.budget, o.budget);
    Sink out(o.out);
    auto& os = out.os();
    os << "input=" << render_bits(y.output) << "\n";
    os << "output=" << render_bits(r.output) << "\n";
    os << "stop=" << r.stop << " j=" << r.j_final << " steps=" << r.steps << " constant_fill=" << r.constant_fill << "\n";
    for (std::size_t b = 0; b < r.blocks.size(); ++b)
        os << "block=" << static_cast<std::int64_t>(b) - 1 << " bit=" << r.blocks[b].bit << " length=" << r.blocks[b].length
           << "\n";
}

void run_construct_config(Options o) {
    auto c = parse_construct_config(slurp(o.file));
    o.pcf = c.pcf;
    o.seed = render_bits(c.seed);
    o.tree = c.tree;
    if (c.depth) o.depth = c.depth;
    if (c.blocks) o.blocks = c.blocks;
    o.budget = c.budget;
    if (c.kind == "atoms4") run_atoms4(o);
    else if (c.kind == "gamma") run_gamma(o);
    else if (c.kind == "xi-ioc") run_xi_ioc(o);
    else if (c.kind == "xi-dim") run_xi_dim(o);
    else if (c.kind == "lambda") run_lambda(o);
    else throw ParseError("construct config: missing kind");
}

void run_gran(const Options& o) {
    auto [a, b] = parse_range(o.range);
    auto mu = load_measure(o.measure);
    std::uint64_t depth = std::max<std::uint64_t>(o.depth, b + 2);
    auto tree = tree_from_oracle(mu, depth);
    Sink out(o.out);
    out.os() << "n,g_exact,g_sandwich\n";
    for (std::uint64_t n = a; n <= b; ++n)
        out.os() << n << ',' << granularity_exact(tree, n) << ',' << granularity_sandwich(mu, n, o.budget) << '\n';
}

void run_profile(const Options& o) {
    BitString X = load_sequence(o.seq);
    std::optional<MeasureOracle> mu;
    if (!o.measure.empty() && o.measure != "none") mu = load_measure(o.measure);
    ReferenceMachine U;
    std::vector<ProfileRow> rows;
    if (o.from <= o.N) {
        rows = complexity_profile(X, mu ? &*mu : nullptr, U, o.t, o.N);
        rows.erase(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(o.from));
    }
    Sink out(o.out);
    write_profile_csv(out.os(), rows);
}

void run_scan(const Options& o) {
    BitString X = load_sequence(o.seq);
    ReferenceMachine U;
    auto r = witness_scan(X, load_order(o.order), U, o.t, o.N, parse_mode(o.mode), {o.use_ka, o.from});
    Sink out(o.out);
    auto& os = out.os();
    os << "mode=" << mode_name(r.mode) << " order=" << r.order << " range=" << r.from << ".." << r.to
       << " verdict=" << (r.verdict == Verdict::consistent ? "consistent" : "refuted");
    if (r.refuted_at) os << " refuted_at=" << *r.refuted_at;
    os << " certificate=" << (r.certificate ? "yes" : "no") << "\nnote=" << r.note << "\n";
    for (std::size_t k = 0; k < r.values.size(); ++k) os << "n=" << r.from + k << " c=" << r.values[k].str() << "\n";
}

void run_calibrate(const Options& o) {
    auto [a, b] = parse_range(o.seeds);
    std::vector<std::uint64_t> seeds;
    for (auto s = a; s <= b; ++s) seeds.push_back(s);
    ReferenceMachine U;
    Sink out(o.out);
    write_machine_constants(out.os(), U.name(), calibrate(U, o.t, seeds));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact finite-depth measures, complexity estimators and stage constructions on Cantor space"};
    app.require_subcommand(1);
    Options o;
    std::function<void()> action;
    auto bind = [&](CLI::App* sub, std::function<void()> f) { sub->callback([&action, f] { action = f; }); };

    auto* measure = app.add_subcommand("measure", "measures and granularity");
    measure->require_subcommand(1);
    auto* gran = measure->add_subcommand("gran", "granularity table as CSV");
    gran->add_option("--measure", o.measure, "lebesgue | point:0 | bernoulli:<p> | atoms4:<sched> | <file>");
    gran->add_option("--n", o.range, "range a..b");
    gran->add_option("--depth", o.depth, "materialization depth for the exact column");
    gran->add_option("--budget", o.budget);
    gran->add_option("--out", o.out);
    bind(gran, [&] { run_gran(o); });
    auto* mtree = measure->add_subcommand("tree", "materialize a measure to a tree file");
    mtree->add_option("--measure", o.measure);
    mtree->add_option("--depth", o.depth);
    mtree->add_option("--out", o.out);
    bind(mtree, [&] {
        auto t = tree_from_oracle(load_measure(o.measure), o.depth);
        if (auto r = tree_validate(t); !r) throw InvariantViolation(r.message);
        Sink out(o.out);
        write_tree(out.os(), t);
    });
    auto* mval = measure->add_subcommand("validate", "check additivity and root mass of a tree file");
    mval->add_option("file", o.file)->required();
    bind(mval, [&] {
        std::istringstream in(slurp(o.file));
        auto r = tree_validate(read_tree(in));
        if (!r) throw InvariantViolation("node " + render_bits(r.offender.value_or("")) + ": " + r.message);
        std::cout << "ok\n";
    });

    auto* ord = app.add_subcommand("orders", "order arithmetic");
    ord->require_subcommand(1);
    auto* inv = ord->add_subcommand("inverse", "g and its inverse as CSV");
    inv->add_option("--order", o.order)->required();
    inv->add_option("--N", o.N);
    inv->add_option("--out", o.out);
    bind(inv, [&] {
        auto g = load_order(o.order);
        auto gi = order_inverse(g);
        Sink out(o.out);
        out.os() << "n,g,g_inv\n";
        for (std::uint64_t n = 0; n <= o.N; ++n) out.os() << n << ',' << g(n) << ',' << gi(n) << '\n';
    });
    auto* sand = ord->add_subcommand("sandwich", "check the inverse sandwich and shift lemmas");
    sand->add_option("--f", o.order)->required();
    sand->add_option("--g", o.order2)->required();
    sand->add_option("--c", o.c);
    sand->add_option("--N", o.N);
    bind(sand, [&] {
        auto f = load_order(o.order), g = load_order(o.order2);
        auto a = check_inverse_sandwich(f, g, o.c, o.N);
        auto b = check_inverse_shift(f, g, o.c, o.N);
        std::cout << "sandwich hypothesis=" << a.hypothesis << " conclusion=" << a.conclusion << "\n";
        std::cout << "shift hypothesis=" << b.hypothesis << " conclusion=" << b.conclusion << "\n";
    });

    auto* fun = app.add_subcommand("functional", "monotone functionals");
    fun->require_subcommand(1);
    auto* fval = fun->add_subcommand("validate", "consistency and semimeasure check");
    fval->add_option("file", o.file)->required();
    fval->add_option("--depth", o.depth);
    bind(fval, [&] {
        std::istringstream in(slurp(o.file));
        auto S = read_functional(in);
        require_valid(S);
        auto r = semimeasure_check(S, o.depth);
        if (!r) throw InvariantViolation("semimeasure fails at " + render_bits(r.offender.value_or("")));
        std::cout << "ok\n";
    });
    auto* flam = fun->add_subcommand("lambda", "induced semimeasure of one string");
    flam->add_option("file", o.file)->required();
    flam->add_option("--tau", o.tau);
    bind(flam, [&] {
        std::istringstream in(slurp(o.file));
        auto S = read_functional(in);
        require_valid(S);
        std::cout << lambda_phi(S, parse_seed(o.tau)).str() << "\n";
    });

    auto* cx = app.add_subcommand("complexity", "stage-bounded complexity estimates");
    cx->require_subcommand(1);
    auto* prof = cx->add_subcommand("profile", "k_t, ka_t and deficiency per prefix length");
    prof->add_option("--seq", o.seq, "zeros:<n> | ones:<n> | <file>")->required();
    prof->add_option("--measure", o.measure, "measure spec or none");
    prof->add_option("--t", o.t);
    prof->add_option("--N", o.N);
    prof->add_option("--from", o.from);
    prof->add_option("--out", o.out);
    bind(prof, [&] { run_profile(o); });
    auto* scan = cx->add_subcommand("scan", "witness scan against an order");
    scan->add_option("--seq", o.seq)->required();
    scan->add_option("--order", o.order)->required();
    scan->add_option("--mode", o.mode, "complex | io-complex | anti-complex | io-anti-complex");
    scan->add_option("--t", o.t);
    scan->add_option("--N", o.N);
    scan->add_option("--from", o.from);
    scan->add_flag("--ka", o.use_ka, "use ka_t instead of k_t");
    scan->add_option("--out", o.out);
    bind(scan, [&] { run_scan(o); });
    auto* cal = cx->add_subcommand("calibrate", "measure the machine constant");
    cal->add_option("--t", o.t);
    cal->add_option("--seeds", o.seeds);
    cal->add_option("--out", o.out);
    bind(cal, [&] { run_calibrate(o); });

    auto* con = app.add_subcommand("construct", "stage constructions and encoders");
    con->require_subcommand(1);
    auto common = [&](CLI::App* s) {
        s->add_option("--pcf", o.pcf, "schedule spec");
        s->add_option("--depth", o.depth);
        s->add_option("--budget", o.budget);
        s->add_option("--seed", o.seed, "source bits, repeated as needed");
        s->add_option("--out", o.out);
    };
    auto* a4 = con->add_subcommand("atoms4", "uniform atoms measure");
    common(a4);
    a4->add_option("--trace", o.trace);
    bind(a4, [&] { run_atoms4(o); });
    auto* gam = con->add_subcommand("gamma", "block encoder with a fixed schedule");
    common(gam);
    gam->add_option("--blocks", o.blocks);
    gam->add_option("--schedule", o.schedule, "ref | const:<c>");
    bind(gam, [&] { run_gamma(o); });
    auto* xi = con->add_subcommand("xi-ioc", "block encoder driven by halting times");
    common(xi);
    xi->add_option("--blocks", o.blocks);
    bind(xi, [&] { run_xi_ioc(o); });
    auto* xd = con->add_subcommand("xi-dim", "tree-guided encoder");
    common(xd);
    xd->add_option("--tree", o.tree, "full | delay | nozz | flicker");
    bind(xd, [&] { run_xi_dim(o); });
    auto* lam = con->add_subcommand("lambda", "decoder on a tree-guided encoding");
    common(lam);
    lam->add_option("--tree", o.tree);
    bind(lam, [&] { run_lambda(o); });
    auto* cfg = con->add_subcommand("config", "run a construct v1 config file");
    cfg->add_option("file", o.file)->required();
    cfg->add_option("--trace", o.trace);
    cfg->add_option("--out", o.out);
    bind(cfg, [&] { run_construct_config(o); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kParse;
    }
    try {
        if (action) action();
        std::cout.flush();
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const OrderError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const BudgetExhausted& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kBudget;
    } catch (const DepthExceeded& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kBudget;
    } catch (const NotFound& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kBudget;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
