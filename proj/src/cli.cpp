#include "sentinel/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "sentinel/acyclicity.hpp"
#include "sentinel/bounded.hpp"
#include "sentinel/cycles.hpp"
#include "sentinel/deps.hpp"
#include "sentinel/dlgp.hpp"
#include "sentinel/gen.hpp"

namespace sentinel {

using json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream s;
    for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return s.str();
}

namespace {

json atoms_json(std::span<const Atom> atoms) {
    json a = json::array();
    for (const Atom& x : atoms) a.push_back(x.str());
    return a;
}

std::string braces(std::span<const Atom> atoms) { return "{" + atoms_str(atoms) + "}"; }

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

}  // namespace

json step_json(std::size_t step, const ChaseStep& s) {
    json b = json::object();
    for (const auto& [v, t] : s.h.bindings()) b[v.str()] = t.str();
    json j;
    j["step"] = step;
    j["rule"] = s.rule->label();
    j["bindings"] = std::move(b);
    j["added"] = atoms_json(s.added);
    return j;
}

json witness_json(const ChainWitness& w) {
    json j;
    std::string labels;
    for (const Rule* r : w.path) labels += (labels.empty() ? "" : ",") + r->label();
    j["path"] = "(" + labels + ")";
    j["renaming"] = w.renaming.str();
    j["initial"] = atoms_json(w.trace.initial.atoms());
    json steps = json::array();
    for (std::size_t i = 0; i < w.trace.steps.size(); ++i) steps.push_back(step_json(i + 1, w.trace.steps[i]));
    j["steps"] = std::move(steps);
    j["pathSteps"] = w.path_steps;
    j["chain"] = w.chain;
    return j;
}

json analysis_json(const KSafeResult& r, const RuleSet& R, const std::string& path, const std::string& digest,
                   bool datalog_first) {
    json j;
    j["version"] = kReportVersion;
    j["input"] = {{"path", path}, {"sha256", digest}, {"rules", R.size()}};
    j["status"] = to_string(r.verdict);
    j["k"] = r.k;
    j["condition"] = to_string(r.condition);
    j["datalogFirst"] = datalog_first;
    if (r.witness_cycle) j["witnessCycle"] = r.witness_cycle->str(R);
    if (r.witness) j["witness"] = witness_json(*r.witness);
    j["cyclesEnumerated"] = r.cycles_enumerated;
    j["cyclesPruned"] = r.cycles_pruned;
    j["cyclesChecked"] = r.cycles_checked;
    j["renamingsTried"] = r.renamings_tried;
    j["probes"] = r.probes;
    j["peakAtoms"] = r.peak_atoms;
    j["truncated"] = r.truncated;
    j["reason"] = r.reason;
    j["elapsed"] = r.elapsed.count();
    return j;
}

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Budgets {
    std::uint64_t probes = 1000000;
    std::uint64_t time_ms = 60000;
    std::uint64_t atoms = 100000;
    std::uint64_t renamings = 100000;
    std::uint64_t cycles = 1000000;

    void attach(CLI::App* app) {
        app->add_option("--budget-probes", probes, "Homomorphism probes per cycle")->capture_default_str();
        app->add_option("--budget-time", time_ms, "Milliseconds per cycle")->capture_default_str();
        app->add_option("--budget-atoms", atoms, "Atoms per instance")->capture_default_str();
        app->add_option("--budget-renamings", renamings, "Renamings per cycle")->capture_default_str();
        app->add_option("--budget-cycles", cycles, "k-cycles enumerated")->capture_default_str();
    }

    ChaseBudget mfa() const {
        ChaseBudget b = default_mfa_budget();
        b.max_atoms = atoms;
        b.wall_clock = std::chrono::milliseconds(time_ms);
        return b;
    }

    ActivenessOptions activeness() const {
        ActivenessOptions o;
        o.max_probes = probes;
        o.wall_clock = std::chrono::milliseconds(time_ms);
        o.max_atoms = atoms;
        o.max_renamings = renamings;
        return o;
    }
};

const std::map<std::string, Condition> kConditions{
    {"wa", Condition::WA}, {"ja", Condition::JA}, {"agrd", Condition::AGRD}, {"mfa", Condition::MFA}};
const std::map<std::string, CycleShape> kShapes{{"paths", CycleShape::Paths}, {"edges", CycleShape::Edges}};

struct AnalyzeArgs {
    std::string file;
    Condition condition = Condition::WA;
    std::size_t k = 1;
    bool datalog_first = false;
    CycleShape shape = CycleShape::Paths;
    bool no_relevance = false;
    bool sub_databases = false;
    std::size_t jobs = 0;
    bool json = false;
    Budgets budget;
};

KSafeOptions ksafe_options(const Budgets& b, CycleShape shape, bool datalog_first, bool relevance, std::size_t jobs) {
    KSafeOptions o;
    o.shape = shape;
    o.datalog_first = datalog_first;
    o.relevance_filter = relevance;
    o.max_cycles = b.cycles;
    o.jobs = jobs ? jobs : default_jobs();
    o.activeness = b.activeness();
    return o;
}

void print_witness(std::ostream& out, const ChainWitness& w) {
    if (!w.renaming.is_identity()) out << "renaming: " << w.renaming.str() << "\n";
    out << "I_0 = " << braces(w.trace.initial.atoms()) << "\n";
    for (std::size_t i = 0; i < w.trace.steps.size(); ++i) {
        const ChaseStep& s = w.trace.steps[i];
        bool on_path = std::find(w.path_steps.begin(), w.path_steps.end(), i + 1) != w.path_steps.end();
        out << "I_" << i + 1 << " = I_" << i;
        if (!s.added.empty()) out << " ∪ " << braces(s.added);
        out << "   [" << s.rule->label() << " " << s.h.str() << (on_path ? "" : ", saturation") << "]\n";
    }
    out << "chain:";
    for (std::size_t i = 0; i < w.chain.size(); ++i) out << (i ? " -> " : " ") << w.chain[i];
    out << "\n";
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    std::string text = read_file(a.file);
    SourceDocument doc = parse_dlgp(text, a.file);
    CycleFunction phi(a.condition, a.budget.mfa());
    auto opts = ksafe_options(a.budget, a.shape, a.datalog_first, !a.no_relevance, a.jobs);
    opts.activeness.sub_database = a.sub_databases;
    KSafeResult r = k_safe(doc.rules, a.k, phi, opts);
    if (a.json) {
        auto j = analysis_json(r, doc.rules, a.file, sha256_hex(text), a.datalog_first);
        j["subDatabases"] = a.sub_databases;
        out << j.dump(2) << "\n";
        return exit_code(r.verdict);
    }
    out << "file: " << a.file << "\n";
    out << "condition: " << to_string(r.condition) << "  k: " << r.k
        << "  datalog-first: " << (a.datalog_first ? "yes" : "no") << "\n";
    out << "verdict: " << to_string(r.verdict) << "\n";
    out << "cycles: " << r.cycles_enumerated << " enumerated, " << r.cycles_pruned << " pruned, " << r.cycles_checked
        << " checked" << (r.truncated ? " (truncated)" : "") << "\n";
    out << "renamings tried: " << r.renamings_tried << "  probes: " << r.probes << "  peak atoms: " << r.peak_atoms
        << "  elapsed: " << r.elapsed.count() << " ms\n";
    if (r.witness_cycle) out << "active cycle: " << r.witness_cycle->str(doc.rules) << "\n";
    if (r.witness) print_witness(out, *r.witness);
    if (!r.reason.empty() && !r.witness) out << "reason: " << r.reason << "\n";
    return exit_code(r.verdict);
}

struct ChaseArgs {
    std::string file;
    std::string variant = "restricted";
    std::string database;
    std::uint64_t max_steps = 1000;
    std::uint64_t max_height = kUnlimited;
    std::uint64_t max_atoms = 100000;
    bool detect_cycles = false;
    bool json = false;
};

int cmd_chase(const ChaseArgs& a, std::ostream& out) {
    SourceDocument doc = parse_dlgp(read_file(a.file), a.file);
    Instance I0 = doc.database();
    if (!a.database.empty()) I0 = parse_dlgp(read_file(a.database), a.database).database();
    ChaseBudget b;
    b.max_steps = a.max_steps;
    b.max_height = a.max_height;
    b.max_atoms = a.max_atoms;
    ChaseTrace t = a.variant == "skolem" ? skolem_chase(I0, doc.rules, b, a.detect_cycles)
                                         : restricted_chase(I0, doc.rules, b, a.variant == "datalog-first");
    if (a.json) {
        for (std::size_t i = 0; i < t.steps.size(); ++i) out << step_json(i + 1, t.steps[i]).dump() << "\n";
        json end;
        end["outcome"] = to_string(t.outcome);
        end["exhausted"] = to_string(t.exhausted);
        if (t.cyclic_term.valid()) end["cyclicTerm"] = t.cyclic_term.str();
        end["steps"] = t.steps.size();
        end["atoms"] = t.final.size();
        out << end.dump() << "\n";
    } else {
        out << "I_0 = " << braces(t.initial.atoms()) << "\n";
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            const ChaseStep& s = t.steps[i];
            out << "I_" << i + 1 << " = I_" << i;
            if (!s.added.empty()) out << " ∪ " << braces(s.added);
            out << "   [" << s.rule->label() << " " << s.h.str() << "]\n";
        }
        out << to_string(t.outcome);
        if (t.outcome == ChaseOutcome::BudgetExhausted) out << " (" << to_string(t.exhausted) << ")";
        if (t.outcome == ChaseOutcome::CyclicTermFound) out << " " << t.cyclic_term.str();
        if (t.outcome == ChaseOutcome::Saturated && a.variant != "skolem") out << ": no active trigger";
        out << " after " << t.steps.size() << " steps\n";
    }
    switch (t.outcome) {
        case ChaseOutcome::Saturated: return 0;
        case ChaseOutcome::CyclicTermFound: return 1;
        case ChaseOutcome::BudgetExhausted: return 2;
    }
    return 2;
}

struct CheckArgs {
    std::string file;
    Condition condition = Condition::WA;
    bool json = false;
    Budgets budget;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
    SourceDocument doc = parse_dlgp(read_file(a.file), a.file);
    const RuleSet& R = doc.rules;
    Tri holds = Tri::True;
    std::string evidence;
    switch (a.condition) {
        case Condition::WA: {
            auto w = weak_acyclicity(R);
            holds = w.acyclic ? Tri::True : Tri::False;
            for (const auto& p : w.cycle) evidence += (evidence.empty() ? "" : " -> ") + p.str();
            break;
        }
        case Condition::JA: {
            auto j = joint_acyclicity(R);
            holds = j.acyclic ? Tri::True : Tri::False;
            for (Term y : j.cycle) evidence += (evidence.empty() ? "" : " -> ") + y.str();
            break;
        }
        case Condition::AGRD: {
            auto c = dependency_cycle(dependency_graph(R));
            holds = c ? Tri::False : Tri::True;
            if (c)
                for (auto i : *c) evidence += (evidence.empty() ? "" : " -> ") + R[i].label();
            break;
        }
        case Condition::MFA: {
            auto m = model_faithful_acyclicity(R, a.budget.mfa());
            holds = m.verdict;
            if (m.cyclic_term.valid()) evidence = m.cyclic_term.str();
            if (m.verdict == Tri::Unknown) evidence = to_string(m.exhausted) + " budget";
            break;
        }
    }
    if (a.json) {
        json j;
        j["version"] = kReportVersion;
        j["condition"] = to_string(a.condition);
        j["holds"] = to_string(holds);
        j["evidence"] = evidence;
        out << j.dump(2) << "\n";
    } else {
        out << to_string(a.condition) << ": " << to_string(holds) << "\n";
        if (!evidence.empty()) out << "evidence: " << evidence << "\n";
    }
    return holds == Tri::True ? 0 : holds == Tri::False ? 1 : 2;
}

struct CyclesArgs {
    std::string file;
    std::size_t k = 1;
    Condition condition = Condition::WA;
    CycleShape shape = CycleShape::Paths;
    std::uint64_t max_cycles = 1000000;
    bool json = false;
};

int cmd_cycles(const CyclesArgs& a, std::ostream& out) {
    SourceDocument doc = parse_dlgp(read_file(a.file), a.file);
    const RuleSet& R = doc.rules;
    DependencyGraph g = dependency_graph(R);
    CycleFunction phi(a.condition);
    CycleEnumOptions eo;
    eo.shape = a.shape;
    eo.max_cycles = a.max_cycles;
    json rows = json::array();
    auto stats = enumerate_k_cycles(R, a.k, g, eo, [&](const KCycle& c) {
        bool relevant = is_relevant(g, c.rules);
        bool satisfied = phi(R, std::span<const std::size_t>(c.rules));
        if (a.json)
            rows.push_back({{"cycle", c.str(R)}, {"relevant", relevant}, {"phi", satisfied ? "T" : "F"}});
        else
            out << c.str(R) << "  relevant=" << (relevant ? "yes" : "no") << "  phi=" << (satisfied ? "T" : "F")
                << "\n";
        return true;
    });
    if (a.json) {
        json j;
        j["version"] = kReportVersion;
        j["k"] = a.k;
        j["condition"] = to_string(a.condition);
        j["cycles"] = std::move(rows);
        j["enumerated"] = stats.enumerated;
        j["truncated"] = stats.truncated;
        out << j.dump(2) << "\n";
    } else {
        out << stats.enumerated << " cycles" << (stats.truncated ? " (truncated)" : "") << "\n";
    }
    return stats.truncated ? 2 : 0;
}

struct BoundedArgs {
    std::string file;
    std::string delta = "const:3";
    bool json = false;
    Budgets budget;
};

int cmd_bounded(const BoundedArgs& a, std::ostream& out) {
    SourceDocument doc = parse_dlgp(read_file(a.file), a.file);
    BoundFunction delta = [&] {
        try {
            return BoundFunction::parse(a.delta);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }();
    MembOptions o;
    o.chase.max_atoms = a.budget.atoms;
    o.chase.wall_clock = std::chrono::milliseconds(a.budget.time_ms);
    o.activeness = a.budget.activeness();
    MembReport r = memb_check(doc.rules, delta, o);
    if (a.json) {
        json j;
        j["version"] = kReportVersion;
        j["delta"] = delta.str();
        j["bound"] = r.bound;
        j["result"] = to_string(r.result);
        j["phase"] = r.phase;
        j["pathsChecked"] = r.paths_checked;
        if (r.witness) j["witness"] = witness_json(*r.witness);
        j["reason"] = r.reason;
        j["caveat"] = r.caveat;
        out << j.dump(2) << "\n";
    } else {
        out << "delta: " << delta.str() << "  bound: " << r.bound << "\n";
        out << "result: " << to_string(r.result) << " (phase " << r.phase << ", " << r.paths_checked
            << " paths checked)\n";
        if (r.witness) print_witness(out, *r.witness);
        if (!r.reason.empty()) out << "reason: " << r.reason << "\n";
        if (!r.caveat.empty()) out << "note: " << r.caveat << "\n";
    }
    return r.result == MembResult::T ? 0 : r.result == MembResult::F ? 1 : 2;
}

struct GenerateArgs {
    std::string preset = "chained";
    GenParams params;
    std::string shape;
    std::string output;
};

int cmd_generate(GenerateArgs a, std::ostream& out) {
    if (!a.shape.empty()) a.params.shape = a.shape == "discrete" ? HeadShape::Discrete : HeadShape::Chained;
    SourceDocument doc;
    try {
        doc.rules = generate(a.params);
    } catch (const GenerationError& e) {
        throw UsageError(e.what());
    }
    std::string text = serialize_dlgp(doc);
    if (a.output.empty()) {
        out << text;
    } else {
        std::ofstream f(a.output);
        if (!f) throw UsageError("cannot write " + a.output);
        f << text;
    }
    return 0;
}

struct ReportArgs {
    std::string dir;
    std::vector<std::string> conditions{"agrd", "wa", "ja", "mfa"};
    std::size_t k_min = 0;
    std::size_t k_max = 2;
    std::string format = "csv";
    bool per_file = false;
    bool datalog_first = false;
    std::size_t jobs = 0;
    Budgets budget;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(a.dir)) throw UsageError("not a directory: " + a.dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.dir))
        if (e.is_regular_file() && e.path().extension() == ".dlgp") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (a.k_min > a.k_max) throw UsageError("--k-min exceeds --k-max");

    std::vector<Condition> conds;
    for (const auto& c : a.conditions) conds.push_back(kConditions.at(c));
    // members[k][condition]
    std::vector<std::vector<std::size_t>> members(a.k_max - a.k_min + 1, std::vector<std::size_t>(conds.size(), 0));
    std::vector<std::vector<std::string>> detail;
    for (const auto& f : files) {
        SourceDocument doc;
        try {
            doc = parse_dlgp(read_file(f.string()), f.string());
        } catch (const ParseError& e) {
            err << f.string() << ":" << e.line() << ": " << e.what() << "\n";
            continue;
        }
        for (std::size_t ci = 0; ci < conds.size(); ++ci) {
            CycleFunction phi(conds[ci], a.budget.mfa());
            for (std::size_t k = a.k_min; k <= a.k_max; ++k) {
                auto opts = ksafe_options(a.budget, CycleShape::Paths, a.datalog_first, true, a.jobs);
                KSafeResult r = k_safe(doc.rules, k, phi, opts);
                if (r.verdict == Verdict::Terminating) ++members[k - a.k_min][ci];
                detail.push_back({f.filename().string(), to_string(conds[ci]), std::to_string(k), to_string(r.verdict)});
            }
        }
    }

    bool md = a.format == "markdown";
    auto row = [&](const std::vector<std::string>& cells) {
        if (md) {
            out << "|";
            for (const auto& c : cells) out << " " << c << " |";
        } else {
            for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_cell(cells[i]);
        }
        out << "\n";
    };
    auto rule = [&](std::size_t n) {
        if (!md) return;
        out << "|";
        for (std::size_t i = 0; i < n; ++i) out << "---|";
        out << "\n";
    };
    if (a.per_file) {
        row({"file", "condition", "k", "verdict"});
        rule(4);
        for (const auto& d : detail) row(d);
        return 0;
    }
    std::vector<std::string> header{"k"};
    for (Condition c : conds) header.push_back("k-safe(" + to_string(c) + ")");
    row(header);
    rule(header.size());
    if (files.empty()) return 0;
    for (std::size_t k = a.k_min; k <= a.k_max; ++k) {
        std::vector<std::string> cells{std::to_string(k)};
        for (std::size_t ci = 0; ci < conds.size(); ++ci) cells.push_back(std::to_string(members[k - a.k_min][ci]));
        row(cells);
    }
    return 0;
}

struct GraphArgs {
    std::string file;
    std::string kind = "deps";
};

int cmd_graph(const GraphArgs& a, std::ostream& out) {
    SourceDocument doc = parse_dlgp(read_file(a.file), a.file);
    if (a.kind == "deps") {
        out << dependency_graph(doc.rules).to_dot(doc.rules);
        return 0;
    }
    PositionGraph g = position_graph(doc.rules);
    out << "digraph positions {\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) out << "  n" << i << " [label=\"" << g.nodes[i].str() << "\"];\n";
    for (auto [u, v] : g.normal) out << "  n" << u << " -> n" << v << ";\n";
    for (auto [u, v] : g.special) out << "  n" << u << " -> n" << v << " [style=dashed, label=\"*\"];\n";
    out << "}\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Restricted chase termination analysis for existential rules", "chase-sentinel"};
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto* an = app.add_subcommand("analyze", "Decide k-safe(Φ_Δ) membership");
    an->add_option("file", analyze.file, "Rule file (.dlgp)")->required();
    an->add_option("--condition", analyze.condition, "Acyclicity condition")
        ->transform(CLI::CheckedTransformer(kConditions, CLI::ignore_case));
    an->add_option("--k", analyze.k, "Nesting depth of cycles")->capture_default_str();
    an->add_flag("--datalog-first", analyze.datalog_first, "Analyze under the Datalog-first chase");
    an->add_option("--shape", analyze.shape, "k-cycle shape")->transform(CLI::CheckedTransformer(kShapes));
    an->add_flag("--no-relevance", analyze.no_relevance, "Check irrelevant cycles too");
    an->add_flag("--sub-databases", analyze.sub_databases, "Test cycles on sub-databases of rn(I^σ) built from used copies");
    an->add_option("--jobs", analyze.jobs, "Worker threads (default: CHASE_SENTINEL_JOBS or all cores)");
    an->add_flag("--json", analyze.json, "Emit the JSON report");
    analyze.budget.attach(an);

    ChaseArgs chase;
    auto* ch = app.add_subcommand("chase", "Run a chase and print the derivation");
    ch->add_option("file", chase.file, "Rule file (.dlgp); its facts are the database")->required();
    ch->add_option("--variant", chase.variant)->check(CLI::IsMember({"skolem", "restricted", "datalog-first"}));
    ch->add_option("--database", chase.database, "Facts file replacing the rule file's facts");
    ch->add_option("--max-steps", chase.max_steps)->capture_default_str();
    ch->add_option("--max-height", chase.max_height);
    ch->add_option("--max-atoms", chase.max_atoms)->capture_default_str();
    ch->add_flag("--detect-cycles", chase.detect_cycles, "Stop the skolem chase at the first cyclic term");
    ch->add_flag("--json", chase.json, "Emit one JSON record per step");

    CheckArgs check;
    auto* ck = app.add_subcommand("check", "Check an acyclicity condition on the whole rule set");
    ck->add_option("file", check.file)->required();
    ck->add_option("--condition", check.condition)->transform(CLI::CheckedTransformer(kConditions, CLI::ignore_case));
    ck->add_flag("--json", check.json);
    check.budget.attach(ck);

    CyclesArgs cycles;
    auto* cy = app.add_subcommand("cycles", "List k-cycles with relevance and Φ_Δ");
    cy->add_option("file", cycles.file)->required();
    cy->add_option("--k", cycles.k)->capture_default_str();
    cy->add_option("--condition", cycles.condition)->transform(CLI::CheckedTransformer(kConditions, CLI::ignore_case));
    cy->add_option("--shape", cycles.shape)->transform(CLI::CheckedTransformer(kShapes));
    cy->add_option("--budget-cycles", cycles.max_cycles)->capture_default_str();
    cy->add_flag("--json", cycles.json);

    BoundedArgs bounded;
    auto* bd = app.add_subcommand("bounded", "Check δ-boundedness under the restricted chase");
    bd->add_option("file", bounded.file)->required();
    bd->add_option("--delta", bounded.delta, "const:c, linear:a,b or exptower:k")->capture_default_str();
    bd->add_flag("--json", bounded.json);
    bounded.budget.attach(bd);

    GenerateArgs gen;
    auto* gn = app.add_subcommand("generate", "Generate a random rule set");
    gn->add_option("--preset", gen.preset)->check(CLI::IsMember({"chained", "discrete"}));
    gn->add_option("--count", gen.params.count)->capture_default_str();
    gn->add_option("--pool", gen.params.predicate_pool)->capture_default_str();
    gn->add_option("--arity", gen.params.arity)->capture_default_str();
    gn->add_option("--max-repeated", gen.params.max_repeated)->capture_default_str();
    gn->add_option("--body", gen.params.body_atoms)->capture_default_str();
    gn->add_option("--head", gen.params.head_atoms)->capture_default_str();
    gn->add_option("--shape", gen.shape)->check(CLI::IsMember({"chained", "discrete"}));
    gn->add_option("--seed", gen.params.seed)->capture_default_str();
    gn->add_option("-o,--output", gen.output);

    ReportArgs report;
    auto* rp = app.add_subcommand("report", "Membership grid over a directory of rule files");
    rp->add_option("dir", report.dir)->required();
    rp->add_option("--conditions", report.conditions)
        ->delimiter(',')
        ->check(CLI::IsMember({"wa", "ja", "agrd", "mfa"}));
    rp->add_option("--k-min", report.k_min)->capture_default_str();
    rp->add_option("--k-max", report.k_max)->capture_default_str();
    rp->add_option("--format", report.format)->check(CLI::IsMember({"csv", "markdown"}));
    rp->add_flag("--per-file", report.per_file, "One row per file, condition and k");
    rp->add_flag("--datalog-first", report.datalog_first);
    rp->add_option("--jobs", report.jobs);
    report.budget.attach(rp);

    GraphArgs graph;
    auto* gr = app.add_subcommand("graph", "Export the rule dependency or position graph as DOT");
    gr->add_option("file", graph.file)->required();
    gr->add_option("--kind", graph.kind)->check(CLI::IsMember({"deps", "positions"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitUsage;
    }
    try {
        if (*an) return cmd_analyze(analyze, out);
        if (*ch) return cmd_chase(chase, out);
        if (*ck) return cmd_check(check, out);
        if (*cy) return cmd_cycles(cycles, out);
        if (*bd) return cmd_bounded(bounded, out);
        if (*gn) {
            GenParams base = *preset(gen.preset);
            // Explicit flags override the preset; the preset only decides the head shape.
            if (gen.shape.empty()) gen.params.shape = base.shape;
            return cmd_generate(gen, out);
        }
        if (*rp) return cmd_report(report, out, err);
        if (*gr) return cmd_graph(graph, out);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace sentinel
