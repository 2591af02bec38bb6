#include "oplens/cli/commands.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>

#include "CLI11.hpp"

#include "oplens/cli/matrix_io.hpp"
#include "oplens/cli/report.hpp"
#include "oplens/generators.hpp"
#include "oplens/numrange.hpp"
#include "oplens/structure.hpp"

namespace oplens::cli {

Environment Environment::from_process() {
    Environment env;
    if (const char* tol = std::getenv("OPERATOR_LENS_TOL")) env.tol = tol;
    return env;
}

namespace {

struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    ToleranceContext ctx;
    std::optional<double> tol;
    int max_dim = kMaxGenDim;

    std::string path;
    std::string theorem;
    TheoremParams params;
    int points = 64;
    int p = 2;
    int q = 3;
    int dim = 4;
    int trials = 1000;
    std::uint64_t seed = 7;
    std::string log_path;
    std::string gen_class;
    double scale = 1.0;
    std::string out_path;
    std::string label;
};

void emit(std::ostream& out, const Json& doc) { out << doc.dump(2) << "\n"; }

ComplexMatrix load(const Options& o) {
    ComplexMatrix m = read_matrix_file(o.path);
    if (m.rows() > o.max_dim) {
        throw TooLarge("dim " + std::to_string(m.rows()) + " exceeds --max-dim " + std::to_string(o.max_dim));
    }
    validate_matrix(m);
    return m;
}

int cmd_classify(const Options& o, std::ostream& out) {
    const ComplexMatrix t = load(o);
    Json doc = report_header("classify", o.ctx);
    doc["dim"] = t.rows();
    doc["classes"] = to_json(classify(t, o.ctx));
    emit(out, doc);
    return kExitOk;
}

int cmd_certify(const Options& o, std::ostream& out) {
    const ComplexMatrix t = load(o);
    const PositivityCertificate cert = positivity_certificate(t, o.ctx);
    Json doc = report_header("certify", o.ctx);
    doc["dim"] = t.rows();
    doc["certificate"] = to_json(cert);
    doc["dyadic_bound"] = dyadic_bound(t, o.ctx);
    emit(out, doc);
    return cert.kind == CertificateKind::violation ? kExitNegative : kExitOk;
}

int cmd_decompose(const Options& o, std::ostream& out) {
    const ComplexMatrix t = load(o);
    Json doc = report_header("decompose", o.ctx);
    doc["dim"] = t.rows();
    try {
        const CanonicalSqrtDecomposition d = sqrt_normal_decompose(t, o.ctx);
        doc["decomposition"] = to_json(d, verify_canonical_form(d, t, o.ctx));
        doc["refused"] = nullptr;
        emit(out, doc);
        return kExitOk;
    } catch (const OperatorError& e) {
        if (e.code() != ErrorCode::SquareNotNormal && e.code() != ErrorCode::IllConditioned) throw;
        doc["decomposition"] = nullptr;
        doc["refused"] = {{"code", std::string(to_string(e.code()))}, {"reason", e.what()}};
        emit(out, doc);
        return kExitNegative;
    }
}

int cmd_verify(const Options& o, std::ostream& out) {
    const ComplexMatrix t = load(o);
    TheoremParams params = o.params;
    params.k_max = o.ctx.max_power;
    const TheoremVerdict v = verify_theorem(o.theorem, t, params, o.ctx);
    Json doc = report_header("verify", o.ctx);
    doc["dim"] = t.rows();
    doc["verdict"] = to_json(v, params);
    emit(out, doc);
    return v.consistent ? kExitOk : kExitInconsistent;
}

int cmd_nrange(const Options& o, std::ostream& out) {
    const ComplexMatrix t = load(o);
    char line[96];
    for (const Complex& z : boundary_points(t, o.points, o.ctx)) {
        std::snprintf(line, sizeof line, "%.17g %.17g\n", z.real(), z.imag());
        out << line;
    }
    return kExitOk;
}

int cmd_fuzz(const Options& o, std::ostream& out) {
    if (o.dim > o.max_dim) {
        throw TooLarge("dim " + std::to_string(o.dim) + " exceeds --max-dim " + std::to_string(o.max_dim));
    }
    const FuzzResult r = question_fuzzer(o.p, o.q, o.dim, o.trials, o.seed, o.ctx);
    std::string text;
    for (const auto& line : r.log) text += line + "\n";
    if (o.log_path.empty()) {
        out << text;
    } else {
        write_text_file(o.log_path, text);
        Json doc = report_header("fuzz", o.ctx);
        doc["p"] = o.p;
        doc["q"] = o.q;
        doc["dim"] = o.dim;
        doc["trials"] = r.trials;
        doc["seed"] = o.seed;
        doc["candidates"] = r.candidates;
        doc["log"] = o.log_path;
        emit(out, doc);
    }
    return r.candidates == 0 ? kExitOk : kExitNegative;
}

int cmd_gen(const Options& o, std::ostream& out) {
    if (o.dim > o.max_dim) {
        throw TooLarge("dim " + std::to_string(o.dim) + " exceeds --max-dim " + std::to_string(o.max_dim));
    }
    GenSpec spec;
    spec.cls = parse_gen_class(o.gen_class);
    spec.dim = o.dim;
    spec.seed = o.seed;
    spec.scale = o.scale;
    spec.p = o.p;
    spec.q = o.q;
    const std::string text = serialize_matrix(generate(spec));
    if (o.out_path.empty()) {
        out << text;
    } else {
        write_text_file(o.out_path, text);
    }
    return kExitOk;
}

int cmd_catalog(const Options& o, std::ostream& out) {
    const auto entries = catalog();
    if (o.label.empty()) {
        for (const auto& e : entries) out << e.label << "\n";
        return kExitOk;
    }
    const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.label == o.label; });
    if (it == entries.end()) throw OperatorError(ErrorCode::BadParams, "no catalog entry '" + o.label + "'");
    const std::string text = serialize_matrix(it->matrix);
    if (o.out_path.empty()) {
        out << text;
    } else {
        write_text_file(o.out_path, text);
    }
    return kExitOk;
}

int cmd_theorems(std::ostream& out) {
    for (const auto& id : theorem_ids()) out << id << "\n";
    return kExitOk;
}

int exit_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidMatrix: return kExitUsage;
        case ErrorCode::InternalInconsistency: return kExitInconsistent;
        default: return kExitDomain;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env) {
    Options o;
    CLI::App app{"Operator class, positivity and normality checks for small complex matrices", "oplens"};
    app.require_subcommand(1);
    app.add_option("--tol", o.tol, "absolute tolerance atol (overrides OPERATOR_LENS_TOL)");
    app.add_option("--rtol", o.ctx.rtol, "relative tolerance")->capture_default_str();
    app.add_option("--kmax", o.ctx.max_power, "truncation of searches over exponents")->capture_default_str();
    app.add_option("--grid", o.ctx.angle_grid, "angles in the half-plane search")->capture_default_str();
    app.add_option("--max-dim", o.max_dim, "largest accepted matrix dimension")->capture_default_str();

    auto add_path = [&](CLI::App* sub) { sub->add_option("path", o.path, "matrix file")->required(); };

    CLI::App* classify_cmd = app.add_subcommand("classify", "membership in each operator class");
    add_path(classify_cmd);
    CLI::App* certify_cmd = app.add_subcommand("certify", "positivity certificate or dyadic violation");
    add_path(certify_cmd);
    CLI::App* decompose_cmd = app.add_subcommand("decompose", "canonical model of a square root of a normal matrix");
    add_path(decompose_cmd);

    CLI::App* verify_cmd = app.add_subcommand("verify", "check one structure result on a matrix");
    verify_cmd->add_option("theorem", o.theorem, "result id (see `oplens theorems`)")->required();
    add_path(verify_cmd);
    verify_cmd->add_option("--k", o.params.k, "odd exponent 2k+1")->capture_default_str();
    verify_cmd->add_option("--p", o.params.p, "first exponent of a coprime pair")->capture_default_str();
    verify_cmd->add_option("--q", o.params.q, "second exponent of a coprime pair")->capture_default_str();
    verify_cmd->add_option("--k0", o.params.k0, "start of the exponent tail")->capture_default_str();
    verify_cmd->add_option("--n", o.params.n, "dyadic depth of the sector bound")->capture_default_str();

    CLI::App* nrange_cmd = app.add_subcommand("nrange", "boundary points of the numerical range as 're im' lines");
    add_path(nrange_cmd);
    nrange_cmd->add_option("--points", o.points, "number of boundary points")->capture_default_str();

    CLI::App* fuzz_cmd = app.add_subcommand("fuzz", "seeded search for a non-normal T with normal T^p, Re T^q >= 0");
    fuzz_cmd->add_option("p", o.p, "exponent whose power must be normal")->required();
    fuzz_cmd->add_option("q", o.q, "exponent whose power must be accretive")->required();
    fuzz_cmd->add_option("--dim", o.dim, "matrix dimension")->capture_default_str();
    fuzz_cmd->add_option("--trials", o.trials, "number of specimens")->capture_default_str();
    fuzz_cmd->add_option("--seed", o.seed, "base seed")->capture_default_str();
    fuzz_cmd->add_option("--log", o.log_path, "write the log here and print a summary instead");

    CLI::App* gen_cmd = app.add_subcommand("gen", "write a generated matrix file");
    gen_cmd->add_option("class", o.gen_class, "generator class")->required();
    gen_cmd->add_option("--dim", o.dim, "matrix dimension")->capture_default_str();
    gen_cmd->add_option("--seed", o.seed, "generator seed")->capture_default_str();
    gen_cmd->add_option("--scale", o.scale, "norm scale")->capture_default_str();
    gen_cmd->add_option("--p", o.p, "power exponent for near_hypothesis")->capture_default_str();
    gen_cmd->add_option("--q", o.q, "real-part exponent for near_hypothesis")->capture_default_str();
    gen_cmd->add_option("--out", o.out_path, "output file (default stdout)");

    CLI::App* catalog_cmd = app.add_subcommand("catalog", "list catalog labels or write one entry");
    catalog_cmd->add_option("label", o.label);
    catalog_cmd->add_option("--out", o.out_path, "output file (default stdout)");

    CLI::App* theorems_cmd = app.add_subcommand("theorems", "list result ids for `verify`");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "oplens: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (o.tol) {
            o.ctx.atol = *o.tol;
        } else if (env.tol) {
            std::size_t used = 0;
            try {
                o.ctx.atol = std::stod(*env.tol, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != env.tol->size()) {
                err << "oplens: OPERATOR_LENS_TOL is not a number\n";
                return kExitUsage;
            }
        }
        o.ctx.validate();

        if (classify_cmd->parsed()) return cmd_classify(o, out);
        if (certify_cmd->parsed()) return cmd_certify(o, out);
        if (decompose_cmd->parsed()) return cmd_decompose(o, out);
        if (verify_cmd->parsed()) return cmd_verify(o, out);
        if (nrange_cmd->parsed()) return cmd_nrange(o, out);
        if (fuzz_cmd->parsed()) return cmd_fuzz(o, out);
        if (gen_cmd->parsed()) return cmd_gen(o, out);
        if (catalog_cmd->parsed()) return cmd_catalog(o, out);
        if (theorems_cmd->parsed()) return cmd_theorems(out);
        err << "oplens: no command\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "oplens: " << e.what() << "\n";
        return kExitUsage;
    } catch (const TooLarge& e) {
        err << "oplens: " << e.what() << "\n";
        return kExitTooLarge;
    } catch (const OperatorError& e) {
        err << "oplens: " << e.what() << "\n";
        return exit_for(e.code());
    }
}

}  // namespace oplens::cli
