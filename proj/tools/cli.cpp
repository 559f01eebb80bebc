#include "cli.hpp"

#include <phylocsp/oracle.hpp>
#include <phylocsp/orbits.hpp>
#include <phylocsp/solver.hpp>
#include <phylocsp/synth.hpp>
#include <phylocsp/treeops.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace phylo {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string read_file(const std::string & path)
{
    std::ifstream in(path, std::ios::binary);
    if (! in)
        throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string & path, const std::string & text)
{
    std::ofstream out(path, std::ios::binary);
    if (! out || ! (out << text))
        throw Error("cannot write '" + path + "'");
}

struct Options {
    bool machine = false;
    bool timing = false;
    unsigned threads = 1;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

int env_max_arity()
{
    if (const char * s = std::getenv("PHYLOCSP_MAX_ARITY")) {
        try {
            int k = std::stoi(s);
            if (k >= 1)
                return k;
        }
        catch (const std::exception &) {
        }
        throw Error(std::string("PHYLOCSP_MAX_ARITY must be a positive integer, got '") + s + "'");
    }
    return default_max_arity;
}

struct Input {
    std::string format;
    Instance inst;
    ConstraintLanguage lang;
    AffineHornFormula horn;
};

std::string detect_format(const std::string & path, const std::string & format)
{
    if (format != "auto")
        return format;
    const auto ext = fs::path(path).extension().string();
    if (ext == ".triples")
        return "triples";
    if (ext == ".horn")
        return "horn";
    return "phy";
}

Input load_input(const std::string & path, const std::string & format, const std::string & language)
{
    Input in;
    in.format = detect_format(path, format);
    const std::string text = read_file(path);
    if (in.format == "horn") {
        in.horn = parse_horn(text);
        return in;
    }
    if (in.format == "triples")
        in.inst = parse_triples(text);
    else if (in.format == "phy")
        in.inst = parse_instance(text);
    else
        throw Error("unknown format '" + in.format + "'");
    std::string lang_path = language;
    if (lang_path.empty() && in.inst.language_file) {
        fs::path p = *in.inst.language_file;
        lang_path = p.is_absolute() ? p.string() : (fs::path(path).parent_path() / p).string();
    }
    if (! lang_path.empty())
        in.lang = parse_language(read_file(lang_path));
    check_instance(in.inst, in.lang);
    return in;
}

ordered_json mapping_json(const Solution & sol)
{
    ordered_json m = ordered_json::object();
    for (const auto & [v, leaf] : sol.assignment)
        m[v] = leaf;
    return m;
}

class Report {
public:
    Report(const Options & opt, int argc, const char * const * argv) : opt_(opt), start_(clock::now())
    {
        doc_["version"] = version;
        doc_["command"] = ordered_json::array();
        for (int i = 1; i < argc; ++i)
            doc_["command"].push_back(argv[i]);
        doc_["result"] = ordered_json::object();
    }

    ordered_json & result() { return doc_["result"]; }
    std::ostringstream & text() { return text_; }

    void flush(std::ostream & out)
    {
        double secs = std::chrono::duration<double>(clock::now() - start_).count();
        if (opt_.machine) {
            if (opt_.timing)
                doc_["timing_seconds"] = secs;
            out << doc_.dump(2) << "\n";
        }
        else {
            out << text_.str();
            if (opt_.timing)
                out << "time: " << secs << " s\n";
        }
    }

private:
    using clock = std::chrono::steady_clock;
    const Options & opt_;
    clock::time_point start_;
    ordered_json doc_;
    std::ostringstream text_;
};

void report_solution(Report & rep, const Solution & sol)
{
    const std::string nwk = sol.tree.empty() ? ";" : sol.tree.to_newick();
    rep.result()["tree"] = nwk;
    rep.result()["mapping"] = mapping_json(sol);
    rep.text() << nwk << "\n" << to_mapping(sol);
}

struct SolveArgs {
    std::string file, format = "auto", language, certs, witness, mapping;
    int max_arity = 0;
};

int cmd_solve(const SolveArgs & a, const Options & opt, Report & rep)
{
    Input in = load_input(a.file, a.format, a.language);
    // echelon-based choices unless a seed asks for random ones
    std::mt19937_64 rng(opt.seed);
    std::mt19937_64 * choice = opt.seed_given ? &rng : nullptr;
    Verdict v;
    if (in.format == "horn") {
        v = solve(in.horn, choice);
    }
    else {
        CertificateCache certs(a.max_arity ? a.max_arity : env_max_arity());
        if (! a.certs.empty())
            for (auto & [name, cert] : parse_certificates(read_file(a.certs))) {
                const RelationDef * rel = in.lang.find(name);
                if (! rel)
                    throw Error("certificate for unknown relation '" + name + "'");
                if (rel->arity() != cert.arity() || verify_equivalence(relation_of(*rel), cert))
                    throw Error("certificate for '" + name + "' does not define the relation");
                certs.add(name, std::move(cert));
            }
        try {
            v = solve_instance(in.inst, in.lang, certs, choice);
        }
        catch (const NotAffineHornError & e) {
            rep.result()["status"] = "not-affine-horn";
            rep.result()["reason"] = e.what();
            rep.text() << "not-affine-horn\nreason: " << e.what() << "\n";
            return exit_error;
        }
    }
    rep.result()["status"] = v.sat ? "sat" : "unsat";
    rep.text() << (v.sat ? "sat" : "unsat") << "\n";
    if (! v.sat) {
        rep.result()["reason"] = v.reason;
        rep.text() << "reason: " << v.reason << "\n";
        return exit_negative;
    }
    report_solution(rep, *v.solution);
    if (! a.witness.empty())
        write_file(a.witness, v.solution->tree.empty() ? ";\n" : v.solution->tree.to_newick() + "\n");
    if (! a.mapping.empty())
        write_file(a.mapping, to_mapping(*v.solution));
    return exit_ok;
}

struct ClassifyArgs {
    std::string file, emit_horn;
    int max_arity = 0;
};

int cmd_classify(const ClassifyArgs & a, const Options & opt, Report & rep)
{
    ConstraintLanguage lang = parse_language(read_file(a.file));
    const int max_arity = a.max_arity ? a.max_arity : env_max_arity();
    LanguageVerdict lv = classify_language(lang, max_arity, opt.threads);
    ordered_json rels = ordered_json::array();
    std::map<std::string, AffineHornFormula> certs;
    for (const auto & r : lv.relations) {
        ordered_json j;
        j["name"] = r.name;
        j["arity"] = r.arity;
        j["verdict"] = r.affine_horn ? "affine-horn" : "not-affine-horn";
        rep.text() << r.name << ": " << (r.affine_horn ? "affine-horn" : "not-affine-horn");
        if (r.affine_horn) {
            certs[r.name] = *r.certificate;
            ordered_json clauses = ordered_json::array();
            for (const auto & c : r.certificate->clauses)
                clauses.push_back(to_string(c, r.certificate->vars));
            j["certificate"] = clauses;
        }
        else {
            j["witness"] = r.witness();
            rep.text() << " (" << r.witness() << ")";
        }
        if (r.split_failure)
            j["split_relation"] = r.split_failure->split.with_constants().to_string();
        rep.text() << "\n";
        rels.push_back(j);
    }
    rep.result()["relations"] = rels;
    rep.result()["tractable"] = lv.tractable;
    rep.result()["trivially_satisfiable"] = lv.trivially_satisfiable;
    rep.result()["equality_language"] = lv.equality_language;
    rep.result()["summary"] = lv.summary();
    rep.text() << "language: " << lv.summary() << "\n";
    if (! a.emit_horn.empty())
        write_file(a.emit_horn, to_certificates(certs));
    return lv.tractable ? exit_ok : exit_negative;
}

struct OracleArgs {
    std::string file, format = "auto", language;
    std::size_t max_leaves = 7, max_candidates = 0;
    double timeout = 0;
};

int cmd_oracle(const OracleArgs & a, const Options & opt, Report & rep)
{
    Input in = load_input(a.file, a.format, a.language);
    if (in.format == "horn")
        throw Error("the oracle reads phy and triples instances only");
    OracleBudget budget;
    budget.max_leaves = a.max_leaves;
    budget.max_candidates = a.max_candidates;
    budget.timeout_seconds = a.timeout;
    budget.threads = opt.threads;
    OracleResult r;
    try {
        r = oracle_solve(in.inst, in.lang, budget);
    }
    catch (const OracleInconclusive & e) {
        rep.result()["status"] = "inconclusive";
        rep.result()["reason"] = e.what();
        rep.text() << "inconclusive\nreason: " << e.what() << "\n";
        return exit_inconclusive;
    }
    rep.result()["status"] = r.sat ? "sat" : "unsat";
    rep.result()["candidates_examined"] = r.candidates_examined;
    rep.result()["candidates_total"] = r.candidates_total;
    rep.text() << (r.sat ? "sat" : "unsat") << "\n";
    if (r.sat)
        report_solution(rep, *r.solution);
    rep.text() << "candidates: " << r.candidates_examined << " of " << r.candidates_total << "\n";
    return r.sat ? exit_ok : exit_negative;
}

struct OrbitsArgs {
    int arity = 0;
    std::string formula;
    bool count = false;
};

int cmd_orbits(const OrbitsArgs & a, const Options &, Report & rep)
{
    const int max_arity = env_max_arity();
    std::vector<std::string> keys;
    if (a.formula.empty()) {
        for (const auto & o : enumerate_orbits(a.arity, max_arity))
            keys.push_back(o.key());
    }
    else {
        std::vector<std::string> vars;
        for (int i = 1; i <= a.arity; ++i)
            vars.push_back("x" + std::to_string(i));
        for (const auto & o : relation_of_formula(parse_formula(a.formula, vars), a.arity, max_arity).orbits())
            keys.push_back(o.key());
    }
    rep.result()["arity"] = a.arity;
    rep.result()["count"] = keys.size();
    if (a.count) {
        rep.text() << keys.size() << "\n";
        return exit_ok;
    }
    rep.result()["orbits"] = keys;
    for (const auto & k : keys)
        rep.text() << k << "\n";
    return exit_ok;
}

struct TreeopsArgs {
    int size = 0;
    std::string check = "root";
};

int cmd_treeops(const TreeopsArgs & a, const Options & opt, Report & rep)
{
    std::mt19937_64 rng(opt.seed);
    if (a.size < 1 || a.size > static_cast<int>(default_max_tx_domain))
        throw BoundError("--size must lie in 1.." + std::to_string(default_max_tx_domain));
    OrderedLeafStructure x = random_ordered_structure(a.size, rng);
    FiniteBinaryOp f = build_finite_tx(x, default_max_tx_domain, &rng);
    TxChecks c = check_tx(f, a.check == "all" ? PartitionSearch::All : PartitionSearch::RootSplit);
    NViolation w = n_violation_witness();
    auto yes = [](bool b) { return b ? "yes" : "no"; };

    std::string order;
    for (int i = 0; i < x.size(); ++i)
        order += (i ? " " : "") + x.label(i);
    auto & r = rep.result();
    r["domain"] = x.tree().to_newick();
    r["order"] = order;
    r["codomain"] = f.codomain().to_newick();
    r["injective"] = f.injective();
    r["semidominated"] = c.semidominated;
    r["subsets"] = c.subsets;
    r["perfect_dominance"] = c.perfect_dominance;
    r["clan_pairs"] = c.clan_pairs;
    r["swap_symmetric"] = c.swap_symmetric;
    r["n_violation"] = {{"domain", w.op.domain().tree().to_newick()}, {"outgroup", w.outgroup_yy}, {"in_n", w.in_n}};
    rep.text() << "domain: " << x.tree().to_newick() << "\n"
               << "order: " << order << "\n"
               << "codomain: " << f.codomain().to_newick() << "\n"
               << "injective: " << yes(f.injective()) << "\n"
               << "semidominated: " << yes(c.semidominated) << " (" << c.subsets << " subsets, "
               << (a.check == "all" ? "all partitions" : "root split") << ")\n"
               << "perfect-dominance: " << yes(c.perfect_dominance) << " (" << c.clan_pairs << " clan pairs)\n"
               << "swap-symmetric: " << yes(c.swap_symmetric) << "\n"
               << "n-violation: domain " << w.op.domain().tree().to_newick() << " f(x,x)f(z,z)|f(y,y') "
               << yes(w.outgroup_yy) << ", image in N " << yes(w.in_n) << "\n";
    bool ok = f.injective() && c.semidominated && c.perfect_dominance && c.swap_symmetric && w.outgroup_yy && ! w.in_n;
    return ok ? exit_ok : exit_negative;
}

struct GenArgs {
    int vars = 0, constraints = 0, clauses = 0;
    std::vector<std::string> identify, relations;
    std::string language;
};

int cmd_gen_triples(const GenArgs & a, const Options & opt, Report & rep)
{
    Instance inst = random_satisfiable_triples(a.vars, a.constraints, opt.seed);
    std::string text = to_triples(inst);
    rep.result()["format"] = "triples";
    rep.result()["text"] = text;
    rep.text() << text;
    return exit_ok;
}

int cmd_gen_nae(const GenArgs & a, const Options & opt, Report & rep)
{
    NaeInstance nae = random_nae(a.vars, a.clauses, opt.seed);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto & s : a.identify) {
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw Error("--identify expects x=y, got '" + s + "'");
        pairs.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    nae = identify(nae, pairs);
    std::string text;
    for (const auto & c : nae.clauses)
        text += "# nae " + nae.vars[c[0]] + " " + nae.vars[c[1]] + " " + nae.vars[c[2]] + "\n";
    text += to_phy(nae_to_phylo(nae));
    rep.result()["format"] = "phy";
    rep.result()["text"] = text;
    rep.text() << text;
    return exit_ok;
}

int cmd_gen_random(const GenArgs & a, const Options & opt, Report & rep)
{
    ConstraintLanguage lang;
    if (! a.language.empty())
        lang = parse_language(read_file(a.language));
    std::vector<std::string> rels = a.relations;
    if (rels.empty())
        for (const auto & r : lang.declared())
            rels.push_back(r.name);
    std::mt19937_64 rng(opt.seed);
    Instance inst = random_instance(lang, rels, a.vars, a.constraints, rng);
    if (! a.language.empty())
        inst.language_file = a.language;
    std::string text = to_phy(inst);
    rep.result()["format"] = "phy";
    rep.result()["text"] = text;
    rep.text() << text;
    return exit_ok;
}

}  // namespace

int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
    CLI::App app{"Phylogeny constraint satisfaction: solver, classifier, oracle and checkers", "phylocsp"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_flag("--machine", opt.machine, "Print one JSON document instead of text");
    app.add_flag("--timing", opt.timing, "Report wall-clock time");
    app.add_option("--threads", opt.threads, "Worker threads for the oracle and classifier")
        ->check(CLI::Range(1u, 256u));
    auto * seed_opt = app.add_option("--seed", opt.seed, "Random seed (default 0)");
    app.set_version_flag("--version", version);

    SolveArgs sa;
    auto * solve_cmd = app.add_subcommand("solve", "Decide an instance over an affine Horn language");
    solve_cmd->add_option("FILE", sa.file)->required();
    solve_cmd->add_option("--format", sa.format)->check(CLI::IsMember({"auto", "triples", "phy", "horn"}));
    solve_cmd->add_option("--language", sa.language, "Language file, overriding the instance header");
    solve_cmd->add_option("--certs", sa.certs, "Certificates written by classify --emit-horn");
    solve_cmd->add_option("--witness", sa.witness, "Write the witness tree (Newick)");
    solve_cmd->add_option("--mapping", sa.mapping, "Write the variable to leaf mapping");
    solve_cmd->add_option("--max-arity", sa.max_arity)->check(CLI::PositiveNumber);

    ClassifyArgs ca;
    auto * classify_cmd = app.add_subcommand("classify", "Classify the relations of a language");
    classify_cmd->add_option("FILE", ca.file)->required();
    classify_cmd->add_option("--max-arity", ca.max_arity)->check(CLI::PositiveNumber);
    classify_cmd->add_option("--emit-horn", ca.emit_horn, "Write affine Horn certificates");

    OracleArgs oa;
    auto * oracle_cmd = app.add_subcommand("oracle", "Decide an instance by exhaustive search");
    oracle_cmd->add_option("FILE", oa.file)->required();
    oracle_cmd->add_option("--format", oa.format)->check(CLI::IsMember({"auto", "triples", "phy"}));
    oracle_cmd->add_option("--language", oa.language);
    oracle_cmd->add_option("--max-leaves", oa.max_leaves);
    oracle_cmd->add_option("--max-candidates", oa.max_candidates);
    oracle_cmd->add_option("--timeout", oa.timeout, "Seconds; 0 means none");

    OrbitsArgs ra;
    auto * orbits_cmd = app.add_subcommand("orbits", "Print the orbit catalogue or a formula's orbits");
    orbits_cmd->add_option("--arity", ra.arity)->required()->check(CLI::PositiveNumber);
    orbits_cmd->add_option("--formula", ra.formula, "Formula over x1..xk");
    orbits_cmd->add_flag("--count", ra.count);

    TreeopsArgs ta;
    auto * treeops_cmd = app.add_subcommand("treeops", "Build and check an affine tree operation");
    treeops_cmd->add_option("--size", ta.size)->required();
    treeops_cmd->add_option("--check", ta.check)->check(CLI::IsMember({"root", "all"}));

    GenArgs ga;
    auto * gen_cmd = app.add_subcommand("gen", "Generate instances");
    gen_cmd->require_subcommand(1);
    auto * gen_triples = gen_cmd->add_subcommand("triples", "Triples valid in a random tree");
    gen_triples->add_option("--vars", ga.vars)->required();
    gen_triples->add_option("--constraints", ga.constraints)->required();
    auto * gen_nae = gen_cmd->add_subcommand("nae", "A random NAE-3SAT instance as an Nd instance");
    gen_nae->add_option("--vars", ga.vars)->required();
    gen_nae->add_option("--clauses", ga.clauses)->required();
    gen_nae->add_option("--identify", ga.identify, "Merge NAE variables, e.g. v1=v2");
    auto * gen_random = gen_cmd->add_subcommand("random", "Random constraints over a language");
    gen_random->add_option("--language", ga.language);
    gen_random->add_option("--relations", ga.relations)->delimiter(',');
    gen_random->add_option("--vars", ga.vars)->required();
    gen_random->add_option("--constraints", ga.constraints)->required();
    for (auto * sub : {gen_triples, gen_nae, gen_random})
        sub->fallthrough();
    gen_cmd->fallthrough();
    for (auto * sub : {solve_cmd, classify_cmd, oracle_cmd, orbits_cmd, treeops_cmd})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp & e) {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForAllHelp & e) {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForVersion & e) {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError & e) {
        app.exit(e, out, err);
        err << app.help();
        return exit_error;
    }

    opt.seed_given = seed_opt->count() > 0;
    Report rep(opt, argc, argv);
    int code = exit_error;
    try {
        if (*solve_cmd)
            code = cmd_solve(sa, opt, rep);
        else if (*classify_cmd)
            code = cmd_classify(ca, opt, rep);
        else if (*oracle_cmd)
            code = cmd_oracle(oa, opt, rep);
        else if (*orbits_cmd)
            code = cmd_orbits(ra, opt, rep);
        else if (*treeops_cmd)
            code = cmd_treeops(ta, opt, rep);
        else if (*gen_triples)
            code = cmd_gen_triples(ga, opt, rep);
        else if (*gen_nae)
            code = cmd_gen_nae(ga, opt, rep);
        else if (*gen_random)
            code = cmd_gen_random(ga, opt, rep);
    }
    catch (const std::exception & e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }
    rep.flush(out);
    return code;
}

}  // namespace phylo
