#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hdyn/hdyn.hpp"

#ifndef HDYN_DATA_DIR
#define HDYN_DATA_DIR "data"
#endif

using namespace hdyn;

namespace {

struct Options {
    int n = 0;
    int k = -1;
    std::string data, tau, weights = "dagger", matrix, out, data_dir = HDYN_DATA_DIR;
    int jobs = 1;
    long long limit_strata = 2'000'000;
    long long limit_tuples = static_cast<long long>(kDefaultTupleLimit);
    int bound = default_homology_bound();
    bool full = false;
};

void emit(const Json& j, const Options& o) {
    std::string text = j.dump(2) + "\n";
    if (!o.out.empty()) {
        std::ofstream f(o.out);
        if (!f) throw ValidationError("cannot write " + o.out);
        f << text;
        std::cout << Json{{"written", o.out}}.dump() << "\n";
    } else {
        std::cout << text;
    }
}

void require_k(const Options& o) {
    if (o.k < 0) throw ValidationError("--k is required");
}

std::shared_ptr<const HomologyPresentation> presentation(const Options& o) {
    return homology_basis(o.n, o.k, o.bound);
}

void cmd_strata(const Options& o) {
    require_k(o);
    if (o.n < 3 || o.n > 12) throw ValidationError("--n must be in 3..12");
    auto list = enumerate_strata(o.n, o.k, static_cast<std::size_t>(o.limit_strata));
    Json arr = Json::array();
    for (const auto& s : list) {
        Json j = stratum_to_json(s);
        j["partition"] = induced_partition(s).to_string();
        arr.push_back(j);
    }
    emit(Json{{"n", o.n}, {"k", o.k}, {"count", list.size()}, {"strata", arr}}, o);
}

void cmd_homology_dims(const Options& o) {
    if (o.n < 3) throw ValidationError("--n must be at least 3");
    Json dims = Json::object();
    for (int k = 0; k <= o.n - 3; ++k) dims[std::to_string(k)] = homology_basis(o.n, k, o.bound)->rank();
    emit(Json{{"k_dims", dims}}, o);
}

void cmd_homology_basis(const Options& o) {
    require_k(o);
    auto p = presentation(o);
    Json strata = Json::array();
    for (const auto& s : p->strata()) strata.push_back(stratum_to_json(s));
    Json basis = Json::array();
    for (int c : p->quotient().basis_columns()) basis.push_back(c);
    Json proj = Json::array();
    for (std::size_t c = 0; c < p->strata().size(); ++c) {
        Json col = Json::object();
        for (const auto& [b, q] : p->quotient().image(static_cast<int>(c))) col[std::to_string(b)] = to_fraction_string(q);
        proj.push_back(col);
    }
    Json j{{"n", o.n},
           {"k", o.k},
           {"rank", p->rank()},
           {"relation_count", p->relation_count()},
           {"strata", strata},
           {"basis", basis},
           {"projection", proj}};
    emit(j, o);
}

void cmd_filtration_dims(const Options& o) {
    require_k(o);
    auto p = presentation(o);
    Json lam = Json::object();
    for (const auto& mu : partitions_of(o.k)) lam[mu.to_string()] = lambda_subspace(o.n, o.k, mu).dim();
    Json j{{"n", o.n}, {"k", o.k}, {"rank", p->rank()}, {"lambda", lam}};
    if (o.k >= 1) {
        j["lambda_less"] = lambda_less_top(o.n, o.k).dim();
        j["omega"] = omega_quotient(o.n, o.k).dim;
    }
    emit(j, o);
}

void cmd_hassett_kernel(const Options& o) {
    require_k(o);
    WeightDatum w = o.weights == "dagger" ? epsilon_dagger(o.n) : weights_from_json(read_json_file(o.weights));
    presentation(o);
    auto ker = reduction_kernel(o.n, o.k, w);
    Subspace lam = o.k >= 1 ? lambda_less_top(o.n, o.k).space : Subspace(homology_basis(o.n, o.k)->rank());
    emit(Json{{"kernel_dim", ker.dim()}, {"equals_lambda_less", ker.space == lam}}, o);
}

HurwitzData load_data(const Options& o) {
    if (o.data.empty()) throw ValidationError("--data is required");
    return hurwitz_from_json(read_json_file(o.data));
}

void cmd_hurwitz_validate(const Options& o) {
    auto h = load_data(o);
    auto v = validate(h);
    Json j{{"status", status_name(v.status)}};
    if (!v.reason.empty()) j["reason"] = v.reason;
    emit(j, o);
}

void cmd_hurwitz_count(const Options& o) {
    auto h = load_data(o);
    auto fm = fully_mark(h);
    Integer full = count_covers(fm.data, static_cast<std::uint64_t>(o.limit_tuples));
    if (full % fm.deg_nu != 0) throw InternalError("count is not divisible by deg nu");
    emit(Json{{"deg_pi_B", integer_to_json(full / fm.deg_nu)}, {"deg_nu", integer_to_json(fm.deg_nu)}}, o);
}

void cmd_hurwitz_types(const Options& o) {
    auto fm = fully_mark(load_data(o));
    if (o.tau.empty()) throw ValidationError("--tau is required");
    Stratum tau = stratum_from_json(read_json_file(o.tau));
    auto types = enumerate_cover_types(fm.data, tau, static_cast<std::uint64_t>(o.limit_tuples));
    Json arr = Json::array();
    Integer total = 0;
    for (const auto& t : types) {
        Json nodes = Json::array();
        for (const auto& [s, r] : t.type.node_r) {
            Json side = Json::array(), edge = Json::array();
            for (int a = 0; a < fm.data.num_a(); ++a)
                if (s & bit(a)) side.push_back(fm.data.A[a]);
            for (int b = 0; b < fm.data.num_b(); ++b)
                if (t.type.node_edge.at(s) & bit(b)) edge.push_back(fm.data.B[b]);
            nodes.push_back(Json{{"side", side}, {"r", r}, {"target_side", edge}});
        }
        arr.push_back(Json{{"sigma", stratum_to_json(t.type.sigma)},
                           {"fvert", t.type.fvert},
                           {"dvert", t.type.dvert},
                           {"nodes", nodes},
                           {"count", integer_to_json(t.count)},
                           {"m", integer_to_json(t.m)}});
        total += t.m * t.count;
    }
    Integer deg = count_covers(fm.data, static_cast<std::uint64_t>(o.limit_tuples));
    emit(Json{{"marks", fm.data.A},
              {"types", arr},
              {"sum_m_count", integer_to_json(total)},
              {"deg_pi_B_full", integer_to_json(deg)},
              {"degree_check", total == deg}},
         o);
}

PushforwardMatrix compute_matrix(const Options& o, const HurwitzData& h) {
    require_k(o);
    auto lim = static_cast<std::uint64_t>(o.limit_tuples);
    if (o.k == 0) {
        int na = static_cast<int>(h.kept().size());
        PushforwardMatrix m{h.num_b(), na, 0, Matrix{{pushforward_h0(h, lim)}}, {}, {}};
        m.source_basis = homology_basis(h.num_b(), 0)->basis_strata();
        m.target_basis = homology_basis(na, 0)->basis_strata();
        return m;
    }
    if (o.k == 1) return pushforward_h2(h, lim);
    throw ValidationError("pushforward is computed for k = 0 and k = 1 only");
}

void cmd_pushforward(const Options& o) { emit(pushforward_to_json(compute_matrix(o, load_data(o))), o); }

void cmd_dyndeg(const Options& o) {
    auto h = load_data(o);
    require_k(o);
    auto m = self_correspondence_matrix(h, o.k, static_cast<std::uint64_t>(o.limit_tuples));
    auto rep = dynamical_degree(m.entries);
    emit(o.full ? degree_report_full_json(rep) : degree_report_to_json(rep), o);
}

void cmd_blocks(const Options& o) {
    require_k(o);
    if (o.matrix.empty()) throw ValidationError("--matrix is required");
    Matrix m = matrix_from_json(read_json_file(o.matrix));
    presentation(o);
    auto b = filtration_blocks(m, o.n, o.k);
    Json j{{"n", o.n}, {"k", o.k}, {"preserved", b.preserved}, {"violations", b.violations}};
    j["omega_dim"] = b.omega_block.size();
    j["omega_block"] = matrix_to_json(b.omega_block);
    if (b.preserved) {
        j["lambda_dim"] = b.lambda_block.size();
        j["lambda_block"] = matrix_to_json(b.lambda_block);
    }
    auto whole = dynamical_degree(m);
    auto top = dynamical_degree(b.omega_block);
    j["theta_matrix"] = degree_report_to_json(whole);
    j["theta_omega"] = degree_report_to_json(top);
    emit(j, o);
}

void cmd_selftest(const Options& o) {
    std::ostringstream log;
    auto results = acceptance::run_all(o.data_dir, log);
    std::cerr << log.str();
    bool all = true;
    Json arr = Json::array();
    for (const auto& r : results) {
        all = all && r.pass;
        arr.push_back(Json{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        std::cerr << acceptance::format_line(r) << "\n";
    }
    emit(Json{{"criteria", arr}, {"all_pass", all}}, o);
    if (!all) throw std::runtime_error("selftest failed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strata homology, Hurwitz correspondences and dynamical degrees of M_{0,n}"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--jobs", o.jobs, "Worker count (computation is single threaded)")->check(CLI::PositiveNumber);
    app.add_option("--limit-strata", o.limit_strata, "Abort above this many strata")->check(CLI::PositiveNumber);
    app.add_option("--limit-tuples", o.limit_tuples, "Abort above this many monodromy tuples")->check(CLI::PositiveNumber);
    app.add_option("--bound", o.bound, "Largest n for homology presentations")->check(CLI::Range(3, 12));

    auto add_n = [&](CLI::App* c) { c->add_option("--n", o.n, "Number of marks")->required()->check(CLI::Range(3, 64)); };
    auto add_k = [&](CLI::App* c, bool required) {
        auto opt = c->add_option("--k", o.k, "Dimension");
        if (required) opt->required();
        opt->check(CLI::NonNegativeNumber);
    };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "Write JSON here instead of stdout"); };

    auto strata = app.add_subcommand("strata", "List boundary strata");
    add_n(strata), add_k(strata, true), add_out(strata);

    auto homology = app.add_subcommand("homology", "KM presentation of H_2k");
    homology->require_subcommand(1);
    auto hdims = homology->add_subcommand("dims", "Ranks for all k");
    add_n(hdims), add_out(hdims);
    auto hbasis = homology->add_subcommand("basis", "Dump the presentation");
    add_n(hbasis), add_k(hbasis, true), add_out(hbasis);

    auto filtration = app.add_subcommand("filtration", "Partition filtration");
    filtration->require_subcommand(1);
    auto fdims = filtration->add_subcommand("dims", "Dimensions of Lambda and Omega");
    add_n(fdims), add_k(fdims, true), add_out(fdims);

    auto hassett = app.add_subcommand("hassett", "Hassett reductions");
    hassett->require_subcommand(1);
    auto hker = hassett->add_subcommand("kernel", "Kernel of the reduction pushforward");
    add_n(hker), add_k(hker, true), add_out(hker);
    hker->add_option("--weights", o.weights, "dagger or a JSON file of fractions");

    auto hurwitz = app.add_subcommand("hurwitz", "Hurwitz spaces");
    hurwitz->require_subcommand(1);
    auto hval = hurwitz->add_subcommand("validate", "Check Conditions 1, 2 and 2'");
    hval->add_option("--data", o.data)->required();
    add_out(hval);
    auto hcount = hurwitz->add_subcommand("count", "Degree of the target map");
    hcount->add_option("--data", o.data)->required();
    add_out(hcount);
    auto htypes = hurwitz->add_subcommand("types", "Cover types over a target stratum");
    htypes->add_option("--data", o.data)->required();
    htypes->add_option("--tau", o.tau)->required();
    add_out(htypes);

    auto push = app.add_subcommand("pushforward", "Pushforward matrix on H_0 or H_2");
    push->add_option("--data", o.data)->required();
    add_k(push, true), add_out(push);

    auto dyn = app.add_subcommand("dyndeg", "Dynamical degree of a self-correspondence");
    dyn->add_option("--data", o.data)->required();
    add_k(dyn, true), add_out(dyn);
    dyn->add_flag("--full", o.full, "Include the characteristic polynomial and checks");

    auto blocks = app.add_subcommand("blocks", "Filtration blocks of a matrix");
    blocks->add_option("--matrix", o.matrix)->required();
    add_n(blocks), add_k(blocks, true), add_out(blocks);

    auto self = app.add_subcommand("selftest", "Run the acceptance criteria");
    self->add_option("--data-dir", o.data_dir, "Directory with the sample data");
    add_out(self);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        if (code != 0) {
            std::cout << Json{{"error", e.what()}}.dump() << "\n";
            return 2;
        }
        return 0;
    }

    try {
        if (*strata) cmd_strata(o);
        else if (*hdims) cmd_homology_dims(o);
        else if (*hbasis) cmd_homology_basis(o);
        else if (*fdims) cmd_filtration_dims(o);
        else if (*hker) cmd_hassett_kernel(o);
        else if (*hval) cmd_hurwitz_validate(o);
        else if (*hcount) cmd_hurwitz_count(o);
        else if (*htypes) cmd_hurwitz_types(o);
        else if (*push) cmd_pushforward(o);
        else if (*dyn) cmd_dyndeg(o);
        else if (*blocks) cmd_blocks(o);
        else if (*self) cmd_selftest(o);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cout << Json{{"error", e.what()}}.dump() << "\n";
        return 2;
    } catch (const ResourceLimitError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        std::cout << Json{{"error", e.what()}, {"kind", "resource_limit"}}.dump() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
