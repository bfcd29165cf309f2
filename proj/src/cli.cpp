#include "trilocrab/cli.hpp"

#include "trilocrab/hierarchy.hpp"
#include "trilocrab/io.hpp"
#include "trilocrab/render.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>

namespace trilocrab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string default_atlas_path() {
    if (const char* env = std::getenv("TRILOCRAB_ATLAS"); env && *env) return env;
    return std::string(TRILOCRAB_DATA_DIR) + "/trilobite_crab.atlas";
}

std::string default_suite_path() { return std::string(TRILOCRAB_DATA_DIR) + "/lemmas.suite"; }

TorusSweep torus_sweep(const Atlas& a, int max_area, uint64_t budget, int workers) {
    TorusSweep s;
    s.max_area = max_area;
    auto lattices = lattices_up_to(max_area);
    std::stable_sort(lattices.begin(), lattices.end(), [](const LatticeBasis& x, const LatticeBasis& y) {
        return x.u.x * x.v.y < y.u.x * y.v.y;
    });
    int clean_through = 0;
    bool clean = true;
    for (const LatticeBasis& l : lattices) {
        int area = l.u.x * l.v.y;
        if (clean) clean_through = area - 1;
        TorusOutcome o = torus_search(a, l.u, l.v, budget, workers);
        s.nodes += o.nodes;
        ++s.lattices;
        if (o.status == TorusStatus::SAT) {
            if (!s.first_sat) s.first_sat = l;
            clean = false;
        } else if (o.status == TorusStatus::BUDGET_EXHAUSTED) {
            s.budget_hit = true;
            clean = false;
        }
    }
    s.a_max = clean ? max_area : clean_through;
    return s;
}

namespace {

std::string torus_json(const TorusSweep& s) {
    json j{{"max_area", s.max_area}, {"a_max", s.a_max}, {"lattices", s.lattices}, {"budget_hit", s.budget_hit},
           {"nodes", s.nodes}};
    if (s.first_sat)
        j["first_sat"] = {s.first_sat->u.x, s.first_sat->u.y, s.first_sat->v.x, s.first_sat->v.y};
    else
        j["first_sat"] = nullptr;
    return j.dump();
}

std::string file_stem(const std::string& name) {
    std::string s;
    for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
    return s;
}

Atlas load_checked_atlas(const std::string& path) {
    Atlas a = load_atlas_file(path);
    return a;
}

int exit_for(Verdict v) {
    return v == Verdict::VERIFIED ? EXIT_PASS : v == Verdict::FAILED ? EXIT_VERIFIED_FAILURE : EXIT_INCONCLUSIVE;
}

} // namespace

int cmd_prove(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Atlas a = load_checked_atlas(cfg.atlas_path.empty() ? default_atlas_path() : cfg.atlas_path);
    auto atlas_report = validate_atlas(a);
    Suite suite = load_suite_file(cfg.suite_path.empty() ? default_suite_path() : cfg.suite_path);
    RunOptions opt;
    opt.workers = cfg.workers;
    opt.radii = cfg.radii;
    opt.budget = cfg.budget;
    opt.on_lemma = [&err](const LemmaReport& l) {
        err << l.name << " " << verdict_name(l.verdict) << " (" << std::fixed << std::setprecision(1) << l.seconds
            << " s)" << std::endl;
    };
    ProofReport rep = run_all(a, suite, opt);
    TorusSweep torus = torus_sweep(a, cfg.torus_area, cfg.torus_budget, cfg.workers);

    Verdict v = rep.overall();
    std::vector<std::string> problems;
    if (!atlas_report.ok()) {
        v = Verdict::FAILED;
        problems.push_back("atlas fails validation: " + atlas_report.violations.front());
    }
    if (rep.vacuous) {
        v = Verdict::FAILED;
        problems.push_back("suite has no lemmas");
    }
    if (torus.first_sat) {
        v = Verdict::FAILED;
        problems.push_back("periodic tiling exists (area " + std::to_string(torus.first_sat->u.x * torus.first_sat->v.y) + ")");
    } else if (torus.budget_hit && v == Verdict::VERIFIED) {
        v = Verdict::INCONCLUSIVE;
    }

    std::set<std::string> known;
    for (const auto& l : suite.lemmas) known.insert(l.name);
    if (!cfg.out_dir.empty()) {
        fs::create_directories(fs::path(cfg.out_dir) / "figures");
        fs::create_directories(fs::path(cfg.out_dir) / "traces");
    }
    int replayed = 0;
    for (const LemmaReport& l : rep.lemmas) {
        for (size_t i = 0; i < l.cases.size(); ++i) {
            const CaseResult& c = l.cases[i];
            if (c.proof.steps.empty() || !c.window) continue;
            ReplayResult r = replay_refutation(a, *c.window, true, c.proof, known);
            ++replayed;
            if (!r.ok) {
                v = Verdict::FAILED;
                problems.push_back(l.name + " case " + std::to_string(i) + " does not replay: " + r.error);
            }
            if (cfg.out_dir.empty()) continue;
            std::string stem = file_stem(l.name) + "_" + std::to_string(i);
            write_file((fs::path(cfg.out_dir) / "traces" / (stem + ".json")).string(), trace_to_json(c.proof));
            write_file((fs::path(cfg.out_dir) / "figures" / (stem + ".svg")).string(),
                       render_trace_svg(a, *c.window, c.proof));
        }
    }
    json final{{"verdict", verdict_name(v)}, {"problems", problems}, {"replayed", replayed}};
    json extra{{"torus", json::parse(torus_json(torus))}, {"final", final}};
    std::string js = report_to_json(rep, "summary", extra.dump());
    std::string text = report_to_text(rep);
    std::ostringstream tail;
    tail << "torus: every lattice up to area " << torus.a_max << " UNSAT (swept to " << torus.max_area << ")";
    if (torus.first_sat)
        tail << ", SAT at (" << torus.first_sat->u.x << "," << torus.first_sat->u.y << "),(" << torus.first_sat->v.x
             << "," << torus.first_sat->v.y << ")";
    if (torus.budget_hit) tail << ", budget exhausted on some lattice";
    tail << "\n";
    for (const std::string& p : problems) tail << "problem: " << p << "\n";
    tail << "proof traces replayed: " << replayed << "\n";
    tail << "verdict " << verdict_name(v) << "\n";
    text += tail.str();
    if (!cfg.out_dir.empty()) {
        write_file((fs::path(cfg.out_dir) / "report.json").string(), js);
        write_file((fs::path(cfg.out_dir) / "report.txt").string(), text);
    }
    out << text;
    return exit_for(v);
}

namespace {

std::vector<int> parse_radii(const std::string& s) {
    std::vector<int> r;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) r.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (r.empty()) throw std::invalid_argument("empty radius list");
    for (size_t i = 1; i < r.size(); ++i)
        if (r[i] <= r[i - 1]) throw std::invalid_argument("radii must be strictly increasing");
    if (r.front() < 0) throw std::invalid_argument("radii must be non-negative");
    return r;
}

std::optional<Kind> kind_arg(const std::string& s) {
    if (s == "T" || s == "t") return Kind::TRILOBITE;
    if (s == "C" || s == "c" || s == "O" || s == "o") return Kind::CRAB;
    return parse_kind(s);
}

void emit(const std::string& path, const std::string& data, std::ostream& out) {
    if (path.empty() || path == "-") out << data;
    else write_file(path, data);
}

int trilobites(const Patch& p) {
    int n = 0;
    for (auto& [id, q] : p.placements()) n += q.kind == Kind::TRILOBITE;
    return n;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"trilobite and crab tiling toolkit"};
    app.require_subcommand(1);
    std::string atlas_path = default_atlas_path();
    app.add_option("--atlas", atlas_path, "atlas file (default $TRILOCRAB_ATLAS or the bundled atlas)");

    auto* atlas_cmd = app.add_subcommand("atlas", "atlas tools");
    auto* validate_cmd = atlas_cmd->add_subcommand("validate", "load and self-check an atlas");
    std::string validate_path;
    validate_cmd->add_option("path", validate_path, "atlas file");
    atlas_cmd->require_subcommand(1);

    RunConfig cfg;
    std::string radii_s;
    uint64_t budget = 0;
    auto* prove = app.add_subcommand("prove", "run the lemma suite and the torus sweep");
    prove->add_option("--suite", cfg.suite_path, "suite file");
    prove->add_option("--budget", budget, "node budget per search")->check(CLI::PositiveNumber);
    prove->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
    prove->add_option("--radii", radii_s, "radius schedule, comma separated");
    prove->add_option("--out", cfg.out_dir, "output directory");
    prove->add_option("--torus-area", cfg.torus_area, "largest fundamental-domain area swept")->check(CLI::NonNegativeNumber);
    prove->add_option("--torus-budget", cfg.torus_budget, "node budget per torus")->check(CLI::PositiveNumber);

    int levels = 0;
    std::string kind_s = "TRILOBITE", out_path;
    auto* inflate_cmd = app.add_subcommand("inflate", "inflate a single tile");
    inflate_cmd->add_option("levels", levels, "inflation levels")->required()->check(CLI::NonNegativeNumber);
    inflate_cmd->add_option("--kind", kind_s, "TRILOBITE or CRAB");
    inflate_cmd->add_option("--out", out_path, "output patch file");

    std::string in_path;
    int margin = -1;
    auto* compose_cmd = app.add_subcommand("compose", "group a patch into supertiles");
    compose_cmd->add_option("input", in_path, "patch file")->required();
    compose_cmd->add_option("--out", out_path, "output patch file");
    compose_cmd->add_option("--margin", margin, "interior margin");

    int shift_margin = 3;
    auto* shift_cmd = app.add_subcommand("shift", "slide the half plane left of the first chain");
    shift_cmd->add_option("input", in_path, "patch file")->required();
    shift_cmd->add_option("--out", out_path, "output patch file");
    shift_cmd->add_option("--margin", shift_margin, "interior margin");

    std::vector<int> basis;
    int max_area = 0;
    uint64_t torus_budget = 50'000'000;
    int workers = 1;
    bool strict = false;
    auto* torus_cmd = app.add_subcommand("torus", "search for a periodic tiling");
    torus_cmd->add_option("basis", basis, "u.x u.y v.x v.y")->expected(4);
    torus_cmd->add_option("--max-area", max_area, "sweep every lattice up to this area")->check(CLI::PositiveNumber);
    torus_cmd->add_option("--budget", torus_budget, "node budget")->check(CLI::PositiveNumber);
    torus_cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    torus_cmd->add_flag("--strict-corners", strict, "accepted for symmetry with search; tori have no boundary");

    std::string format = "ascii", trace_path;
    std::vector<int> window;
    auto* render_cmd = app.add_subcommand("render", "draw a patch or a proof trace");
    render_cmd->add_option("input", in_path, "patch file (omit for a blank page)");
    render_cmd->add_option("--format", format, "ascii or svg")->check(CLI::IsMember({"ascii", "svg"}));
    render_cmd->add_option("--out", out_path, "output file");
    render_cmd->add_option("--window", window, "x0 y0 x1 y1")->expected(4);
    render_cmd->add_option("--trace", trace_path, "trace file to draw over the window");

    std::string mode_s = "first";
    auto* search_cmd = app.add_subcommand("search", "complete a CLOSED patch inside its window");
    search_cmd->add_option("input", in_path, "patch file")->required();
    search_cmd->add_option("--mode", mode_s, "first, all, count or refute")
        ->check(CLI::IsMember({"first", "all", "count", "refute"}));
    search_cmd->add_option("--budget", budget, "node budget")->check(CLI::PositiveNumber);
    search_cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    search_cmd->add_option("--out", out_path, "solution patch (first) or proof trace (refute)");
    search_cmd->add_flag("--strict-corners", strict, "check window-boundary corners with wildcards outside");

    std::vector<std::string> argv_s{"trilocrab"};
    argv_s.insert(argv_s.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_s) argv.push_back(s.data());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return EXIT_PASS;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return EXIT_INPUT_ERROR;
    }

    try {
        if (*validate_cmd) {
            Atlas a = load_atlas_file(validate_path.empty() ? atlas_path : validate_path);
            auto r = validate_atlas(a);
            out << "atlas " << a.name << " hash " << a.hash << "\n";
            out << "oriented tile classes " << a.oriented_class_count() << "\n";
            out << "corner tuples " << a.corner_rule.allowed.size() << ", parity pairs " << a.parity.allowed.size()
                << "\n";
            for (const std::string& v : r.violations) out << "violation: " << v << "\n";
            out << (r.ok() ? "valid" : "invalid") << "\n";
            return r.ok() ? EXIT_PASS : EXIT_VERIFIED_FAILURE;
        }
        if (*prove) {
            cfg.atlas_path = atlas_path;
            if (!radii_s.empty()) cfg.radii = parse_radii(radii_s);
            if (budget) cfg.budget = budget;
            return cmd_prove(cfg, out, err);
        }
        Atlas a = load_atlas_file(atlas_path);
        if (*inflate_cmd) {
            auto k = kind_arg(kind_s);
            if (!k) {
                err << "unknown tile kind " << kind_s << "\n";
                return EXIT_INPUT_ERROR;
            }
            Patch p = inflate_tile(a, *k, levels);
            emit(out_path, patch_to_json(p), out);
            if (!out_path.empty()) out << "placements " << p.size() << ", trilobites " << trilobites(p) << "\n";
            return EXIT_PASS;
        }
        if (*compose_cmd) {
            Patch p = patch_from_json(a, read_file(in_path));
            ComposeOptions co;
            co.margin = margin;
            SuperPatch s = compose(p, co);
            auto r = verify_super_axioms(s);
            emit(out_path, patch_to_json(s.supertiles, s.level), out);
            if (!out_path.empty()) {
                out << "supertiles " << s.supertiles.size() << ", unwitnessed trilobites " << s.unwitnessed.size() << "\n";
                out << validity_to_text(r);
            }
            return r.ok() ? EXIT_PASS : EXIT_VERIFIED_FAILURE;
        }
        if (*shift_cmd) {
            Patch p = patch_from_json(a, read_file(in_path));
            auto chains = detect_chains(p, shift_margin);
            if (chains.empty()) {
                err << "CHAIN_NOT_SPANNING: no chain in the patch\n";
                return EXIT_VERIFIED_FAILURE;
            }
            Patch q = shift_halfplane(p, chains.front(), shift_margin);
            emit(out_path, patch_to_json(q), out);
            return EXIT_PASS;
        }
        if (*torus_cmd) {
            if (max_area > 0) {
                TorusSweep s = torus_sweep(a, max_area, torus_budget, workers);
                out << "lattices " << s.lattices << ", all UNSAT up to area " << s.a_max << "\n";
                if (s.first_sat)
                    out << "SAT (" << s.first_sat->u.x << "," << s.first_sat->u.y << ") (" << s.first_sat->v.x << ","
                        << s.first_sat->v.y << ")\n";
                if (s.first_sat) return EXIT_VERIFIED_FAILURE;
                return s.budget_hit ? EXIT_INCONCLUSIVE : EXIT_PASS;
            }
            if (basis.size() != 4) {
                err << "torus needs a basis u.x u.y v.x v.y or --max-area\n";
                return EXIT_INPUT_ERROR;
            }
            TorusOutcome o;
            try {
                o = torus_search(a, {basis[0], basis[1]}, {basis[2], basis[3]}, torus_budget, workers);
            } catch (const std::invalid_argument& e) {
                err << e.what() << "\n";
                return EXIT_INPUT_ERROR;
            }
            out << torus_status_name(o.status) << "\n";
            for (const Placement& p : o.tiling) out << to_string(p) << "\n";
            return o.status == TorusStatus::UNSAT ? EXIT_PASS
                   : o.status == TorusStatus::SAT ? EXIT_VERIFIED_FAILURE
                                                  : EXIT_INCONCLUSIVE;
        }
        if (*render_cmd) {
            std::optional<Window> w;
            if (window.size() == 4) w = Window{window[0], window[1], window[2], window[3]};
            Patch p = in_path.empty() ? Patch(a, w, BoundaryPolicy::CLOSED) : patch_from_json(a, read_file(in_path));
            if (w && !in_path.empty()) p = p.with_window(w, p.policy());
            if (!trace_path.empty()) {
                if (!p.window()) {
                    err << "rendering a trace needs a window\n";
                    return EXIT_INPUT_ERROR;
                }
                emit(out_path, render_trace_svg(a, *p.window(), trace_from_json(read_file(trace_path))), out);
                return EXIT_PASS;
            }
            emit(out_path, format == "svg" ? render_svg(p) : render_ascii(p), out);
            return EXIT_PASS;
        }
        if (*search_cmd) {
            Patch p = patch_from_json(a, read_file(in_path));
            if (p.policy() != BoundaryPolicy::CLOSED || !p.window()) {
                err << "search needs a CLOSED patch with a window\n";
                return EXIT_INPUT_ERROR;
            }
            if (strict) p = p.with_strict(true);
            SearchOptions so;
            so.mode = mode_s == "first" ? SearchMode::FIRST
                      : mode_s == "all"  ? SearchMode::ALL
                      : mode_s == "count" ? SearchMode::COUNT
                                          : SearchMode::REFUTE;
            if (budget) so.budget = budget;
            so.workers = workers;
            SearchOutcome o = search_region(p, p.window()->cells(), so);
            out << search_status_name(o.status) << " nodes " << o.nodes;
            if (so.mode == SearchMode::COUNT || so.mode == SearchMode::ALL) out << " count " << o.count;
            out << "\n";
            if (!out_path.empty()) {
                if (so.mode == SearchMode::REFUTE && o.status == SearchStatus::REFUTED)
                    write_file(out_path, trace_to_json(o.proof));
                else if (!o.solutions.empty())
                    write_file(out_path, patch_to_json(Patch::assemble(a, p.window(), BoundaryPolicy::CLOSED, o.solutions.front())));
            }
            if (o.status == SearchStatus::BUDGET_EXHAUSTED) return EXIT_INCONCLUSIVE;
            if (so.mode == SearchMode::REFUTE) return o.status == SearchStatus::REFUTED ? EXIT_PASS : EXIT_VERIFIED_FAILURE;
            if (so.mode == SearchMode::FIRST) return o.status == SearchStatus::FOUND ? EXIT_PASS : EXIT_VERIFIED_FAILURE;
            return EXIT_PASS;
        }
    } catch (const AtlasError& e) {
        err << e.what() << "\n";
        return EXIT_INPUT_ERROR;
    } catch (const SuiteError& e) {
        err << e.what() << "\n";
        return EXIT_INPUT_ERROR;
    } catch (const IoError& e) {
        err << e.what() << "\n";
        return EXIT_INPUT_ERROR;
    } catch (const HierarchyError& e) {
        err << e.what() << "\n";
        return EXIT_VERIFIED_FAILURE;
    } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return EXIT_INPUT_ERROR;
    } catch (const std::runtime_error& e) {
        err << e.what() << "\n";
        return EXIT_INPUT_ERROR;
    }
    return EXIT_INPUT_ERROR;
}

} // namespace trilocrab
