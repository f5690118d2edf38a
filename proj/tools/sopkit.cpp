// sopkit: command-line front end.
//
// Exit codes: 0 verified/determined, 1 refuted/negative, 2 indeterminate
// (a budget was hit), 64 usage or input error.

#include "sopkit/feq.hpp"
#include "sopkit/parser.hpp"
#include "sopkit/patterns.hpp"
#include "sopkit/rank.hpp"
#include "sopkit/transform.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace sopkit;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kNegative = 1, kUndetermined = 2, kUsage = 64;
constexpr const char *kStructureSchema = "sopkit/structure/1";

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError(path + ": cannot open");
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw InputError(path + ": malformed JSON: " + e.what());
    }
}

/// A bare plugin id, or a theory spec file.
json theory_spec(const std::string &arg)
{
    for (const char *id : {"dlo", "random_graph", "equiv", "tfeq"})
        if (arg == id)
            return {{"plugin", arg}};
    return read_json(arg);
}

PluginPtr theory_from(const json &spec, const std::string &where = "theory")
{
    try {
        return load_theory(spec);
    } catch (const std::exception &e) {
        throw InputError(where + ": " + e.what());
    }
}

TemplatePtr formula_from(const std::string &text, const PluginPtr &T)
{
    try {
        return parse_formula(text, T->signature());
    } catch (const ParseError &e) {
        throw InputError("formula \"" + text + "\": " + e.what() + " (offset " + std::to_string(e.offset()) + ")");
    }
}

/// [{"formula": f, "params": [...], "negated": b, "pair": b}], f defaulting to φ.
PartialType type_from(const json &j, const PluginPtr &T, const TemplatePtr &phi, const std::string &where)
{
    if (!j.is_array())
        throw InputError(where + ": expected an array of instances");
    PartialType out;
    for (const auto &e : j) {
        TemplatePtr t = e.contains("formula") ? formula_from(e["formula"].get<std::string>(), T) : phi;
        ParamTuple params = e.value("params", ParamTuple{});
        if (e.value("pair", false))
            out.push_back(pair_instance(t, std::move(params)));
        else
            out.push_back(substitute(t, std::move(params), !e.value("negated", false)));
    }
    return out;
}

FiniteStructure structure_from(const json &j, const std::string &where)
{
    if (j.contains("schema") && j["schema"] != kStructureSchema)
        throw InputError(where + ": unsupported structure schema " + j["schema"].dump());
    try {
        return FiniteStructure::from_json(j, Signature::feq());
    } catch (const std::exception &e) {
        throw InputError(where + ": " + e.what());
    }
}

json structure_json(const FiniteStructure &M)
{
    json j = M.to_json();
    j["schema"] = kStructureSchema;
    return j;
}

struct Output {
    std::string path;

    void emit(const json &j) const { emit_text(j.dump(2) + "\n"); }
    void emit_text(const std::string &s) const
    {
        if (path.empty() || path == "-") {
            std::cout << s;
            return;
        }
        std::ofstream out(path);
        if (!out)
            throw InputError(path + ": cannot write");
        out << s;
    }
};

struct BudgetFlags {
    int size_cap = 8;
    long time_ms = 0;
    std::size_t node_cap = 20'000'000;

    void add(CLI::App *app)
    {
        app->add_option("--size-cap", size_cap, "Named elements per diagram")->check(CLI::PositiveNumber);
        app->add_option("--time-ms", time_ms, "Wall-clock limit; 0 means none")->check(CLI::NonNegativeNumber);
        app->add_option("--node-cap", node_cap, "Search steps")->check(CLI::PositiveNumber);
    }
    Budget make() const
    {
        return Budget::with_time(node_cap, size_cap, time_ms > 0 ? std::optional<long>(time_ms) : std::nullopt);
    }
};

json budget_json(const Budget &b)
{
    return {{"nodes", b.nodes}, {"size_cap", b.size_cap}, {"exhausted", b.exhausted},
            {"size_truncated", b.size_truncated}};
}

int code_of(Truth t) { return t == Truth::True ? kOk : t == Truth::False ? kNegative : kUndetermined; }

// -- rank -------------------------------------------------------------------

struct RankArgs {
    std::string theory, formula, p, q, diagram, via = "def", out;
    int cap = 3;
    BudgetFlags budget;
};

int run_rank(const RankArgs &a)
{
    const json spec = theory_spec(a.theory);
    auto T = theory_from(spec, a.theory);
    auto phi = formula_from(a.formula, T);
    PartialType p = a.p.empty() ? PartialType{} : type_from(read_json(a.p), T, phi, a.p);
    PartialType q = a.q.empty() ? PartialType{} : type_from(read_json(a.q), T, phi, a.q);
    std::optional<Diagram> D;
    if (!a.diagram.empty())
        D = Diagram::from_json(read_json(a.diagram), T->signature());

    json out{{"formula", phi->text()}, {"theory", T->id()}, {"cap", a.cap}};
    RankValue value;
    auto run = [&](bool tree) {
        Budget b = a.budget.make();
        RankResult r = tree ? rank_via_tree(*T, phi, p, q, a.cap, b, D) : rank(*T, phi, p, q, a.cap, b, D);
        json part{{"value", r.value.to_json()}, {"stats", budget_json(b)}};
        if (r.witness) {
            part["witness"] = tree_to_json(*r.witness);
            part["witness"]["theory"] = spec;
            part["witness"]["formula"] = phi->text();
        }
        return std::make_pair(r.value, part);
    };
    if (a.via == "def" || a.via == "both") {
        auto [v, part] = run(false);
        value = v;
        out["value"] = part["value"];
        out["stats"] = part["stats"];
        if (part.contains("witness"))
            out["witness"] = part["witness"];
    }
    if (a.via == "tree" || a.via == "both") {
        auto [v, part] = run(true);
        if (a.via == "tree") {
            value = v;
            out["value"] = part["value"];
            out["stats"] = part["stats"];
            if (part.contains("witness"))
                out["witness"] = part["witness"];
        } else {
            out["via_tree"] = part;
            out["agree"] = v == value;
        }
    }
    Output{a.out}.emit(out);
    return value.determined() ? kOk : kUndetermined;
}

// -- verify -----------------------------------------------------------------

struct VerifyArgs {
    std::string kind, in, theory, formula, formula2, p, q, dot, out;
    int m = 2, embed_depth = -1;
    BudgetFlags budget;
};

int run_verify(const VerifyArgs &a)
{
    json w = read_json(a.in);
    if (w.contains("family") && (a.kind == "sop1" || a.kind == "sop2" || a.kind == "sop1p"))
        w = w["family"]; // a transform result
    PluginPtr T = !a.theory.empty()      ? theory_from(theory_spec(a.theory), a.theory)
                  : w.contains("theory") ? theory_from(w["theory"], a.in)
                                         : nullptr;
    if (!T)
        throw InputError(a.in + ": no theory given (use --theory or a \"theory\" field)");
    const std::string ftext = !a.formula.empty() ? a.formula : w.value("formula", std::string());
    if (ftext.empty())
        throw InputError(a.in + ": no formula given (use --formula or a \"formula\" field)");
    auto phi = formula_from(ftext, T);
    if (w.contains("schema") && w["schema"] != kWitnessSchema)
        throw InputError(a.in + ": unsupported witness schema " + w["schema"].dump());
    if (!w.contains("schema"))
        throw InputError(a.in + ": missing \"schema\" field");

    Budget b = a.budget.make();
    Report r;
    try {
        if (a.kind == "sop1tree") {
            SopTree t = tree_from_json(w, T->signature());
            PartialType p = a.p.empty() ? PartialType{} : type_from(read_json(a.p), T, phi, a.p);
            PartialType q = a.q.empty() ? PartialType{} : type_from(read_json(a.q), T, phi, a.q);
            r = verify_sop1tree(*T, phi, p, q, t, b);
            if (!a.dot.empty()) {
                Budget db = a.budget.make();
                Output{a.dot}.emit_text(tree_to_dot(*T, phi, t.tuples, t.depth, t.diagram, db));
            }
        } else if (a.kind == "sop1" || a.kind == "sop2" || a.kind == "sop1p") {
            TreeFamily f = family_from_json(w, T->signature());
            r = a.kind == "sop1"   ? verify_sop1_witness(*T, phi, f, b)
                : a.kind == "sop2" ? verify_sop2_witness(*T, phi, f, b)
                                   : verify_sop1p_witness(*T, phi, f, b);
            if (!a.dot.empty()) {
                Budget db = a.budget.make();
                Output{a.dot}.emit_text(tree_to_dot(*T, phi, f.tuples, f.depth + 1, f.diagram, db));
            }
        } else if (a.kind == "sop2pp") {
            WitnessFamily wf = witness_family_from_json(w, T->signature());
            Sop2ppOptions opt;
            opt.m = a.m;
            opt.embed_depth = a.embed_depth;
            r = verify_sop2pp_witness(*T, phi, wf, opt, b);
        } else if (a.kind == "sop3") {
            const std::string gtext = !a.formula2.empty() ? a.formula2 : w.value("formula2", std::string());
            if (gtext.empty())
                throw InputError(a.in + ": sop3 needs a second formula (--formula2 or \"formula2\")");
            auto psi = formula_from(gtext, T);
            Diagram D = Diagram::from_json(w.at("diagram"), T->signature());
            r = verify_sop3_witness(*T, phi, psi, w.at("a").get<std::vector<ParamTuple>>(),
                                    w.at("b").get<std::vector<ParamTuple>>(), D, b);
        } else if (a.kind == "sopn") {
            Diagram D = Diagram::from_json(w.at("diagram"), T->signature());
            r = verify_sopn_witness(*T, phi, w.at("chain").get<std::vector<ParamTuple>>(), w.at("n").get<int>(),
                                    D, b);
        }
    } catch (const json::exception &e) {
        throw InputError(a.in + ": " + e.what());
    } catch (const std::invalid_argument &e) {
        throw InputError(a.in + ": " + e.what());
    }
    json out{{"kind", a.kind}, {"formula", phi->text()}, {"theory", T->id()}, {"report", r.to_json()},
             {"stats", budget_json(b)}};
    Output{a.out}.emit(out);
    return code_of(r.holds);
}

// -- transform --------------------------------------------------------------

struct TransformArgs {
    std::string in, theory, formula, out;
    int m = 2, depth = 3, embed_depth = -1, branch_depth = -1;
    BudgetFlags budget;
};

int run_transform(const TransformArgs &a)
{
    json w = read_json(a.in);
    const json spec = !a.theory.empty() ? theory_spec(a.theory) : w.value("theory", json());
    if (spec.is_null())
        throw InputError(a.in + ": no theory given (use --theory or a \"theory\" field)");
    PluginPtr T = theory_from(spec, a.in);
    const std::string ftext = !a.formula.empty() ? a.formula : w.value("formula", std::string());
    if (ftext.empty())
        throw InputError(a.in + ": no formula given (use --formula or a \"formula\" field)");
    auto theta = formula_from(ftext, T);
    WitnessFamily wf;
    try {
        wf = witness_family_from_json(w, T->signature());
    } catch (const std::exception &e) {
        throw InputError(a.in + ": " + e.what());
    }
    EmbeddingOptions opt;
    opt.m = a.m;
    opt.embed_depth = a.embed_depth;
    opt.branch_depth = a.branch_depth;
    Budget b = a.budget.make();
    json out;
    int code = kOk;
    try {
        TransformResult res = transform_sop2pp_to_sop2(*T, theta, wf, opt, a.depth, b);
        out = res.to_json();
        out["family"]["theory"] = spec;
        out["family"]["formula"] = res.theta_k->text();
        code = code_of(res.verification.holds);
    } catch (const TransformError &e) {
        out = {{"error", e.what()}};
        code = e.kind() == TransformError::Kind::Budget ? kUndetermined : kNegative;
    }
    out["m"] = a.m;
    out["stats"] = budget_json(b);
    Output{a.out}.emit(out);
    return code;
}

// -- feq --------------------------------------------------------------------

json violations_json(const std::vector<feq::Violation> &vs)
{
    json arr = json::array();
    for (const auto &v : vs)
        arr.push_back({{"clause", std::string(1, v.clause)}, {"message", v.message}, {"elements", v.elements}});
    return arr;
}

struct FeqArgs {
    std::string in, formula, out;
    int cap = 16, depth = 2;
    bool seed_empty = false;
    BudgetFlags budget;
};

int run_feq_check(const FeqArgs &a)
{
    FiniteStructure M = structure_from(read_json(a.in), a.in);
    auto vs = feq::check_tfeq(M);
    Output{a.out}.emit({{"ok", vs.empty()}, {"violations", violations_json(vs)}});
    return vs.empty() ? kOk : kNegative;
}

int run_feq_amalgamate(const FeqArgs &a)
{
    json j = read_json(a.in);
    feq::AmalgamInput input;
    try {
        input.base = structure_from(j.at("base"), a.in + ":base");
        input.n0 = structure_from(j.at("n0"), a.in + ":n0");
        input.n1 = structure_from(j.at("n1"), a.in + ":n1");
    } catch (const json::exception &e) {
        throw InputError(a.in + ": " + e.what());
    }
    try {
        FiniteStructure N = feq::amalgamate(input);
        Output{a.out}.emit({{"ok", true}, {"structure", structure_json(N)}});
        return kOk;
    } catch (const feq::AmalgamError &e) {
        static const char *kinds[] = {"disagreement", "uniqueness", "shape"};
        Output{a.out}.emit({{"ok", false},
                            {"error", {{"kind", kinds[static_cast<int>(e.kind())]},
                                       {"message", e.what()},
                                       {"witness", e.witness()}}}});
        return kNegative;
    }
}

int run_feq_close(const FeqArgs &a)
{
    FiniteStructure M = structure_from(read_json(a.in), a.in);
    try {
        FiniteStructure N = feq::ec_extend(M, a.cap, a.seed_empty);
        Output{a.out}.emit({{"ok", true}, {"structure", structure_json(N)}});
        return kOk;
    } catch (const std::length_error &e) {
        Output{a.out}.emit({{"ok", false}, {"error", e.what()}});
        return kNegative;
    }
}

int run_feq_refute(const FeqArgs &a)
{
    auto T = make_plugin("tfeq");
    auto phi = formula_from(a.formula, T);
    Budget b = a.budget.make();
    auto r = feq::nsop1_refutation_search(phi, a.depth, b);
    json out{{"formula", phi->text()},
             {"depth", a.depth},
             {"tree_found", r.tree_found},
             {"exhausted", r.exhausted},
             {"nodes", r.nodes},
             {"size_cap", r.size_cap},
             {"note", r.tree_found ? "a tree exists" : r.exhausted ? "no tree within the size cap"
                                                                   : "budget hit before the search finished"}};
    if (r.tree)
        out["tree"] = tree_to_json(*r.tree);
    Output{a.out}.emit(out);
    return r.tree_found ? kNegative : r.exhausted ? kOk : kUndetermined;
}

// -- diagrams ---------------------------------------------------------------

struct DiagramArgs {
    std::string theory, out;
    int k = 1, arity = 1, cap = 6;
};

int run_diagrams(const DiagramArgs &a)
{
    auto T = theory_from(theory_spec(a.theory), a.theory);
    if (a.k * a.arity > a.cap)
        throw InputError("diagrams: cap " + std::to_string(a.cap) + " cannot host " + std::to_string(a.k) +
                         " tuples of arity " + std::to_string(a.arity));
    json arr = json::array();
    for (const Diagram &d : T->enumerate_diagrams(a.k, a.arity, a.cap))
        arr.push_back(d.to_json());
    Output{a.out}.emit({{"theory", T->id()}, {"count", arr.size()}, {"diagrams", arr}});
    return kOk;
}

// -- selftest ---------------------------------------------------------------

int run_selftest(const std::string &out_path)
{
    json results = json::array();
    bool all = true;
    auto record = [&](const std::string &name, bool ok) {
        results.push_back({{"name", name}, {"ok", ok}});
        all = all && ok;
    };

    auto dlo = make_plugin("dlo");
    auto interval = parse_formula("y0 < x0 & x0 < y1 ; vars x0 | y0 y1", dlo->signature());
    record("parse round trip", parse_formula(interval->text(), dlo->signature())->text() == interval->text());
    for (int d = 1; d <= 4; ++d) {
        Budget b;
        record("dlo sop1 tree depth " + std::to_string(d),
               verify_sop1tree(*dlo, interval, {}, {}, dlo_sop1_tree(d), b).ok());
    }
    {
        Budget b;
        b.size_cap = 10;
        record("dlo rank AtLeast(4)", rank(*dlo, interval, {}, {}, 4, b).value == RankValue::at_least(4));
    }
    {
        auto rg = make_plugin("random_graph");
        Budget b;
        b.size_cap = 6;
        auto r = parse_formula("R(x0,y0)", rg->signature());
        record("random graph rank 0", rank(*rg, r, {}, {}, 3, b).value == RankValue::finite(0));
    }
    {
        Budget b;
        TreeFamily f = dlo_dyadic_family(3);
        record("dyadic family is sop2", verify_sop2_witness(*dlo, interval, f, b).ok());
        record("dyadic family is sop1", verify_sop1_witness(*dlo, interval, f, b).ok());
    }
    {
        auto P = make_tree_pattern("incomparable-tops", 1);
        auto theta = parse_formula("true ; vars x0 | y0 y1", P->signature());
        WitnessFamily wf;
        wf.n = 1;
        wf.depth = 5;
        wf.canonical = true;
        wf.diagram = P->empty_diagram();
        Budget b;
        auto res = transform_sop2pp_to_sop2(*P, theta, wf, {}, 3, b);
        record("transform incomparable-tops", res.verification.ok());
    }
    {
        FiniteStructure M = feq::ec_extend(FiniteStructure(Signature::feq()), 8, true);
        record("ec_extend seed is a T_feq model", feq::check_tfeq(M).empty());
    }
    Output{out_path}.emit({{"ok", all}, {"checks", results}});
    return all ? kOk : kNegative;
}

} // namespace

int main(int argc, char **argv)
{
    if (const char *t = std::getenv("SOPKIT_THREADS")) {
        char *end = nullptr;
        long n = std::strtol(t, &end, 10);
        if (*t == '\0' || *end != '\0' || n < 1) {
            std::cerr << "SOPKIT_THREADS must be a positive integer\n";
            return kUsage;
        }
    }

    CLI::App app{"sopkit: SOP ranks, witnesses and the T_feq amalgam"};
    app.require_subcommand(1);

    RankArgs ra;
    auto *rank_cmd = app.add_subcommand("rank", "Compute rk^1_phi(p, q) under a depth cap");
    rank_cmd->add_option("--theory", ra.theory, "Plugin id or theory spec file")->required();
    rank_cmd->add_option("--formula", ra.formula, "phi(x; y)")->required();
    rank_cmd->add_option("--p", ra.p, "Instances over x (JSON array)");
    rank_cmd->add_option("--q", ra.q, "Instances over y (JSON array)");
    rank_cmd->add_option("--diagram", ra.diagram, "Diagram of the parameters of p and q");
    rank_cmd->add_option("--cap", ra.cap, "Depth cap")->check(CLI::PositiveNumber);
    rank_cmd->add_option("--via", ra.via, "def, tree or both")->check(CLI::IsMember({"def", "tree", "both"}));
    rank_cmd->add_option("--out", ra.out, "Output file (default stdout)");
    ra.budget.add(rank_cmd);

    VerifyArgs va;
    auto *verify_cmd = app.add_subcommand("verify", "Check a witness file");
    verify_cmd->add_option("--kind", va.kind, "Witness kind")
        ->required()
        ->check(CLI::IsMember({"sop1tree", "sop1", "sop2", "sop1p", "sop2pp", "sop3", "sopn"}));
    verify_cmd->add_option("--in", va.in, "Witness file")->required();
    verify_cmd->add_option("--theory", va.theory, "Plugin id or theory spec file");
    verify_cmd->add_option("--formula", va.formula, "phi (or theta)");
    verify_cmd->add_option("--formula2", va.formula2, "psi, for sop3");
    verify_cmd->add_option("--p", va.p, "p for sop1tree");
    verify_cmd->add_option("--q", va.q, "q for sop1tree");
    verify_cmd->add_option("--m", va.m, "m for sop2pp")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--embed-depth", va.embed_depth, "Depth h maps into, for sop2pp");
    verify_cmd->add_option("--dot", va.dot, "Also write a Graphviz drawing");
    verify_cmd->add_option("--out", va.out, "Output file (default stdout)");
    va.budget.add(verify_cmd);

    TransformArgs ta;
    auto *transform_cmd = app.add_subcommand("transform", "SOP''_2 witness to SOP_2 witness for theta^<k>");
    transform_cmd->add_option("--in", ta.in, "SOP''_2 witness file")->required();
    transform_cmd->add_option("--theory", ta.theory, "Plugin id or theory spec file");
    transform_cmd->add_option("--formula", ta.formula, "theta");
    transform_cmd->add_option("--m", ta.m, "m")->check(CLI::PositiveNumber);
    transform_cmd->add_option("--depth", ta.depth, "Output depth d")->check(CLI::NonNegativeNumber);
    transform_cmd->add_option("--embed-depth", ta.embed_depth, "Depth h maps into");
    transform_cmd->add_option("--branch-depth", ta.branch_depth, "Length of the branches nu*_eta");
    transform_cmd->add_option("--out", ta.out, "Output file (default stdout)");
    ta.budget.add(transform_cmd);

    FeqArgs fa;
    auto *feq_cmd = app.add_subcommand("feq", "T_feq structures");
    feq_cmd->require_subcommand(1);
    auto *check_cmd = feq_cmd->add_subcommand("check", "Check the T_feq axioms");
    check_cmd->add_option("--in", fa.in, "Structure file")->required();
    auto *amalg_cmd = feq_cmd->add_subcommand("amalgamate", "Amalgamate {base, n0, n1}");
    amalg_cmd->add_option("--in", fa.in, "Input file")->required();
    auto *close_cmd = feq_cmd->add_subcommand("close", "Bounded existential closure");
    close_cmd->add_option("--in", fa.in, "Structure file")->required();
    close_cmd->add_option("--cap", fa.cap, "Size bound")->check(CLI::PositiveNumber);
    close_cmd->add_flag("--seed-empty", fa.seed_empty, "Seed an empty input with {q R p}");
    auto *refute_cmd = feq_cmd->add_subcommand("refute", "Search for a phi-SOP'_1 tree over T*_feq");
    refute_cmd->add_option("--formula", fa.formula, "phi over {E, R}")->required();
    refute_cmd->add_option("--depth", fa.depth, "Tree depth")->check(CLI::NonNegativeNumber);
    fa.budget.add(refute_cmd);
    for (auto *c : {check_cmd, amalg_cmd, close_cmd, refute_cmd})
        c->add_option("--out", fa.out, "Output file (default stdout)");

    DiagramArgs da;
    auto *diagrams_cmd = app.add_subcommand("diagrams", "Enumerate diagrams up to isomorphism");
    diagrams_cmd->add_option("--theory", da.theory, "Plugin id or theory spec file")->required();
    diagrams_cmd->add_option("--k", da.k, "Number of tuples")->check(CLI::NonNegativeNumber);
    diagrams_cmd->add_option("--arity", da.arity, "Tuple length")->check(CLI::NonNegativeNumber);
    diagrams_cmd->add_option("--cap", da.cap, "Named elements")->check(CLI::PositiveNumber);
    diagrams_cmd->add_option("--out", da.out, "Output file (default stdout)");

    std::string self_out;
    auto *self_cmd = app.add_subcommand("selftest", "Run the bundled invariant checks");
    self_cmd->add_option("--out", self_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*rank_cmd)
            return run_rank(ra);
        if (*verify_cmd)
            return run_verify(va);
        if (*transform_cmd)
            return run_transform(ta);
        if (*feq_cmd) {
            if (*check_cmd)
                return run_feq_check(fa);
            if (*amalg_cmd)
                return run_feq_amalgamate(fa);
            if (*close_cmd)
                return run_feq_close(fa);
            return run_feq_refute(fa);
        }
        if (*diagrams_cmd)
            return run_diagrams(da);
        return run_selftest(self_out);
    } catch (const InputError &e) {
        std::cerr << "sopkit: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception &e) {
        std::cerr << "sopkit: " << e.what() << "\n";
        return kUsage;
    }
}
