// Command-line front end: spectrum tables, Green's-function evaluation and
// scans, identity-check batteries, and oracle comparisons, with reproducible
// JSON/CSV output.
//
// Exit codes: 0 success / all checks pass, 1 usage error, 2 numerical
// precondition violation, 3 check failure.

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "abc/amplitude.hpp"
#include "abc/kstransform.hpp"
#include "abc/oracle.hpp"
#include "abc/spectrum.hpp"

namespace {

// ---------------------------------------------------------------------------
// deterministic JSON: fixed key order, %.17g floats, no locale dependence

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

struct Json {
    enum class Kind { Null, Number, Integer, Bool, String, Array, Object };
    Kind kind = Kind::Null;
    double num = 0.0;
    long long inum = 0;
    bool boolean = false;
    std::string str;
    std::vector<Json> items;
    std::vector<std::pair<std::string, Json>> fields;

    static Json null() { return {}; }
    static Json number(double v) {
        Json j;
        j.kind = Kind::Number;
        j.num = v;
        return j;
    }
    static Json integer(long long v) {
        Json j;
        j.kind = Kind::Integer;
        j.inum = v;
        return j;
    }
    static Json boolean_(bool v) {
        Json j;
        j.kind = Kind::Bool;
        j.boolean = v;
        return j;
    }
    static Json string(std::string v) {
        Json j;
        j.kind = Kind::String;
        j.str = std::move(v);
        return j;
    }
    static Json array() {
        Json j;
        j.kind = Kind::Array;
        return j;
    }
    static Json object() {
        Json j;
        j.kind = Kind::Object;
        return j;
    }
    Json& add(const std::string& key, Json v) {
        fields.emplace_back(key, std::move(v));
        return *this;
    }
    Json& push(Json v) {
        items.push_back(std::move(v));
        return *this;
    }
    void dump(std::string& out, int depth) const {
        std::string pad(2 * depth, ' ');
        std::string padin(2 * (depth + 1), ' ');
        switch (kind) {
            case Kind::Null: out += "null"; break;
            case Kind::Number: out += fmt_double(num); break;
            case Kind::Integer: out += std::to_string(inum); break;
            case Kind::Bool: out += boolean ? "true" : "false"; break;
            case Kind::String: out += '"' + json_escape(str) + '"'; break;
            case Kind::Array: {
                if (items.empty()) {
                    out += "[]";
                    break;
                }
                out += "[\n";
                for (std::size_t i = 0; i < items.size(); ++i) {
                    out += padin;
                    items[i].dump(out, depth + 1);
                    if (i + 1 < items.size()) out += ',';
                    out += '\n';
                }
                out += pad + "]";
                break;
            }
            case Kind::Object: {
                if (fields.empty()) {
                    out += "{}";
                    break;
                }
                out += "{\n";
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    out += padin + '"' + json_escape(fields[i].first) + "\": ";
                    fields[i].second.dump(out, depth + 1);
                    if (i + 1 < fields.size()) out += ',';
                    out += '\n';
                }
                out += pad + "}";
                break;
            }
        }
    }
    std::string dump() const {
        std::string out;
        dump(out, 0);
        out += '\n';
        return out;
    }
};

Json complex_json(std::complex<double> v) {
    Json j = Json::object();
    j.add("re", Json::number(v.real()));
    j.add("im", Json::number(v.imag()));
    return j;
}

// ---------------------------------------------------------------------------
// shared run configuration

struct CommonOpts {
    double mass = 1.0;
    double coulomb = -1.0;
    double flux = 0.0;
    std::string format = "json";
    std::string out_path;
    unsigned long long seed = 12345;
};

using KV = std::vector<std::pair<std::string, std::string>>;

Json config_json(const KV& kv) {
    Json c = Json::object();
    for (const auto& [k, v] : kv) c.add(k, Json::string(v));
    return c;
}

void write_output(const CommonOpts& common, const std::string& text) {
    if (common.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(common.out_path, std::ios::binary);
    if (!f) throw abc::precondition_error("cannot open output path " + common.out_path);
    f << text;
}

std::string csv_header_from(const KV& kv) {
    std::string out;
    for (const auto& [k, v] : kv) out += "# " + k + " = " + v + "\n";
    return out;
}

// flat key=value config file; command-line flags override file values
std::vector<std::string> apply_config_file(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") path = args[i + 1];
    if (path.empty()) return args;

    std::ifstream f(path);
    if (!f) throw abc::precondition_error("cannot read config file " + path);
    std::vector<std::string> injected;
    std::string line;
    while (std::getline(f, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || key == "command") continue;
        injected.push_back("--" + key + "=" + val);
    }
    // insert file options right after the subcommand so explicit flags win
    std::vector<std::string> merged;
    bool placed = false;
    for (const auto& a : args) {
        merged.push_back(a);
        if (!placed && !a.empty() && a[0] != '-') {
            merged.insert(merged.end(), injected.begin(), injected.end());
            placed = true;
        }
    }
    return merged;
}

std::string fmt_ull(unsigned long long v) { return std::to_string(v); }

// ---------------------------------------------------------------------------
// spectrum command

struct SpectrumOpts {
    double max_principal = 4.0;
};

int run_spectrum(const CommonOpts& common, const SpectrumOpts& opt) {
    abc::spectrum::PhysParams p(common.mass, common.coulomb, common.flux);
    auto levels = abc::spectrum::enumerate_levels(p, opt.max_principal);

    KV kv{{"command", "spectrum"},
          {"mass", fmt_double(common.mass)},
          {"coulomb", fmt_double(common.coulomb)},
          {"flux", fmt_double(common.flux)},
          {"max-principal", fmt_double(opt.max_principal)},
          {"format", common.format},
          {"seed", fmt_ull(common.seed)}};

    if (common.format == "csv") {
        std::string out = csv_header_from(kv);
        out += "energy,principal,degeneracy,members\n";
        for (const auto& l : levels) {
            out += fmt_double(l.energy) + "," + fmt_double(l.principal) + "," +
                   std::to_string(l.degeneracy()) + ",";
            for (std::size_t i = 0; i < l.members.size(); ++i) {
                const auto& q = l.members[i];
                out += std::to_string(q.m) + ":" + std::to_string(q.n) + ":" +
                       std::to_string(q.nprime);
                if (i + 1 < l.members.size()) out += ';';
            }
            out += '\n';
        }
        write_output(common, out);
        return 0;
    }

    Json root = Json::object();
    root.add("config", config_json(kv));
    Json results = Json::array();
    for (const auto& l : levels) {
        Json row = Json::object();
        row.add("energy", Json::number(l.energy));
        row.add("principal", Json::number(l.principal));
        row.add("degeneracy", Json::integer(l.degeneracy()));
        Json members = Json::array();
        for (const auto& q : l.members) {
            Json qn = Json::object();
            qn.add("m", Json::integer(q.m));
            qn.add("n", Json::integer(q.n));
            qn.add("nprime", Json::integer(q.nprime));
            members.push(std::move(qn));
        }
        row.add("members", std::move(members));
        results.push(std::move(row));
    }
    root.add("results", std::move(results));
    Json diag = Json::object();
    diag.add("level_count", Json::integer(static_cast<long long>(levels.size())));
    root.add("diagnostics", std::move(diag));
    write_output(common, root.dump());
    return 0;
}

// ---------------------------------------------------------------------------
// green command

struct GreenOpts {
    double energy = -0.5;
    double ra = 1.0, theta_a = 1.2, phi_a = 0.0;
    double rb = 2.0, theta_b = 1.8, phi_b = 1.0;
    int m_max = 12, n_max = 40;
    double quad_rel_tol = 1e-10, quad_abs_tol = 1e-14;
    std::string scan;  // empty, or one of energy|ra|rb|theta-a|theta-b|phi-a|phi-b
    double scan_from = 0.0, scan_to = 0.0;
    int scan_points = 0;
};

struct GreenRecord {
    double coord = 0.0;
    bool has_qint = false, has_pw = false;
    std::complex<double> qint, pw;
    double qint_err = 0.0, pw_err = 0.0;
    std::string note;
};

GreenRecord eval_green_point(const abc::spectrum::PhysParams& p,
                             const GreenOpts& o, double coord,
                             const std::string& scan_var) {
    GreenOpts c = o;
    if (scan_var == "energy") c.energy = coord;
    else if (scan_var == "ra") c.ra = coord;
    else if (scan_var == "rb") c.rb = coord;
    else if (scan_var == "theta-a") c.theta_a = coord;
    else if (scan_var == "theta-b") c.theta_b = coord;
    else if (scan_var == "phi-a") c.phi_a = coord;
    else if (scan_var == "phi-b") c.phi_b = coord;

    abc::amplitude::EndpointPair pts{
        abc::ks::SphericalPoint(c.ra, c.theta_a, c.phi_a),
        abc::ks::SphericalPoint(c.rb, c.theta_b, c.phi_b)};
    abc::amplitude::TruncationSpec t;
    t.m_max = c.m_max;
    t.n_max = c.n_max;
    t.quad_rel_tol = c.quad_rel_tol;
    t.quad_abs_tol = c.quad_abs_tol;
    abc::amplitude::FixedEnergy fe =
        abc::amplitude::FixedEnergy::from_energy(p, c.energy);

    GreenRecord rec;
    rec.coord = coord;
    auto pw = abc::amplitude::green_partial_wave(p, pts, fe, t);
    rec.pw = pw.value;
    rec.pw_err = pw.err_estimate;
    rec.has_pw = true;
    try {
        auto qi = abc::amplitude::green_q_integral(p, pts, fe, t);
        rec.qint = qi.value;
        rec.qint_err = qi.err_estimate;
        rec.has_qint = true;
    } catch (const abc::precondition_error& e) {
        rec.note = e.what();
    }
    return rec;
}

int run_green(const CommonOpts& common, const GreenOpts& opt) {
    abc::spectrum::PhysParams p(common.mass, common.coulomb, common.flux);

    std::vector<double> coords;
    std::string scan_var = opt.scan;
    if (scan_var.empty()) {
        coords.push_back(opt.energy);
        scan_var = "energy";
    } else {
        if (opt.scan_points < 2)
            throw abc::precondition_error("scan needs --scan-points >= 2");
        for (int i = 0; i < opt.scan_points; ++i)
            coords.push_back(opt.scan_from + (opt.scan_to - opt.scan_from) * i /
                                                 (opt.scan_points - 1));
    }

    std::vector<GreenRecord> records;
    bool single = opt.scan.empty();
    for (double c : coords) {
        if (single) {
            records.push_back(eval_green_point(p, opt, c, scan_var));
        } else {
            try {
                records.push_back(eval_green_point(p, opt, c, scan_var));
            } catch (const abc::precondition_error& e) {
                GreenRecord rec;
                rec.coord = c;
                rec.note = e.what();
                records.push_back(rec);
            }
        }
    }

    KV kv{{"command", "green"},
          {"mass", fmt_double(common.mass)},
          {"coulomb", fmt_double(common.coulomb)},
          {"flux", fmt_double(common.flux)},
          {"energy", fmt_double(opt.energy)},
          {"ra", fmt_double(opt.ra)},
          {"theta-a", fmt_double(opt.theta_a)},
          {"phi-a", fmt_double(opt.phi_a)},
          {"rb", fmt_double(opt.rb)},
          {"theta-b", fmt_double(opt.theta_b)},
          {"phi-b", fmt_double(opt.phi_b)},
          {"m-max", std::to_string(opt.m_max)},
          {"n-max", std::to_string(opt.n_max)},
          {"quad-rel-tol", fmt_double(opt.quad_rel_tol)},
          {"quad-abs-tol", fmt_double(opt.quad_abs_tol)},
          {"format", common.format},
          {"seed", fmt_ull(common.seed)}};
    if (!opt.scan.empty()) {
        kv.emplace_back("scan", opt.scan);
        kv.emplace_back("scan-from", fmt_double(opt.scan_from));
        kv.emplace_back("scan-to", fmt_double(opt.scan_to));
        kv.emplace_back("scan-points", std::to_string(opt.scan_points));
    }

    if (common.format == "csv") {
        std::string out = csv_header_from(kv);
        out += scan_var +
               ",qint_re,qint_im,qint_err,pw_re,pw_im,pw_err,rel_diff,note\n";
        for (const auto& r : records) {
            out += fmt_double(r.coord) + ",";
            if (r.has_qint)
                out += fmt_double(r.qint.real()) + "," +
                       fmt_double(r.qint.imag()) + "," + fmt_double(r.qint_err);
            else
                out += ",,";
            out += ",";
            if (r.has_pw)
                out += fmt_double(r.pw.real()) + "," + fmt_double(r.pw.imag()) +
                       "," + fmt_double(r.pw_err);
            else
                out += ",,";
            out += ",";
            if (r.has_qint && r.has_pw)
                out += fmt_double(std::abs(r.qint - r.pw) / std::abs(r.pw));
            out += "," + r.note + "\n";
        }
        write_output(common, out);
        return 0;
    }

    Json root = Json::object();
    root.add("config", config_json(kv));
    Json results = Json::array();
    for (const auto& r : records) {
        Json row = Json::object();
        row.add(scan_var, Json::number(r.coord));
        if (r.has_qint) {
            Json q = complex_json(r.qint);
            q.add("err_estimate", Json::number(r.qint_err));
            row.add("q_integral", std::move(q));
        } else {
            row.add("q_integral", Json::null());
        }
        if (r.has_pw) {
            Json w = complex_json(r.pw);
            w.add("err_estimate", Json::number(r.pw_err));
            row.add("partial_wave", std::move(w));
        } else {
            row.add("partial_wave", Json::null());
        }
        if (r.has_qint && r.has_pw)
            row.add("rel_diff",
                    Json::number(std::abs(r.qint - r.pw) / std::abs(r.pw)));
        else
            row.add("rel_diff", Json::null());
        if (!r.note.empty()) row.add("note", Json::string(r.note));
        results.push(std::move(row));
    }
    root.add("results", std::move(results));
    Json diag = Json::object();
    diag.add("record_count",
             Json::integer(static_cast<long long>(records.size())));
    root.add("diagnostics", std::move(diag));
    write_output(common, root.dump());
    return 0;
}

// ---------------------------------------------------------------------------
// check command

struct CheckOpts {
    std::string which = "all";
    int samples = 10000;
};

struct CheckRow {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass() const { return residual <= tolerance; }
};

void check_ks(std::vector<CheckRow>& rows, int samples,
              unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uc(-2.0, 2.0), u01(0.0, 1.0);
    double worst_alg = 0.0, worst_jac = 0.0;
    for (int i = 0; i < samples; ++i) {
        abc::ks::KSPoint u{uc(rng), uc(rng), uc(rng), uc(rng)};
        double r = u.norm_sq();
        if (r < 0.05) continue;
        worst_alg = std::max(
            worst_alg, std::fabs(abc::ks::ks_map(u).norm() - r) / r);
        std::array<double, 4> du{uc(rng), uc(rng), uc(rng), uc(rng)};
        auto dx = abc::ks::ks_differential(u, du);
        double lhs =
            dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2] + dx[3] * dx[3];
        double du2 =
            du[0] * du[0] + du[1] * du[1] + du[2] * du[2] + du[3] * du[3];
        worst_alg = std::max(
            worst_alg, std::fabs(lhs - 4.0 * r * du2) / (4.0 * r * du2));
        double p2 = u.u1 * u.u1 + u.u2 * u.u2, q2 = u.u3 * u.u3 + u.u4 * u.u4;
        if (p2 > 1e-3 && q2 > 1e-3) {
            double up = abc::ks::ab_oneform_pullback(u, du, 0.37);
            double dn = abc::ks::ab_oneform_cartesian(u, du, 0.37);
            worst_alg = std::max(
                worst_alg, std::fabs(up - dn) / std::max(1.0, std::fabs(dn)));
        }
        if (i % 97 == 0) {
            const double h = 1e-6;
            std::array<std::array<double, 4>, 4> jm{};
            std::array<double, 4> base{u.u1, u.u2, u.u3, u.u4};
            for (int col = 0; col < 4; ++col) {
                auto cp = base, cm = base;
                cp[col] += h;
                cm[col] -= h;
                auto xp = abc::ks::ks_map({cp[0], cp[1], cp[2], cp[3]});
                auto xm = abc::ks::ks_map({cm[0], cm[1], cm[2], cm[3]});
                jm[0][col] = (xp.x - xm.x) / (2 * h);
                jm[1][col] = (xp.y - xm.y) / (2 * h);
                jm[2][col] = (xp.z - xm.z) / (2 * h);
                std::array<double, 4> e{};
                e[col] = 1.0;
                jm[3][col] = abc::ks::ks_differential(u, e)[3];
            }
            double det = 1.0;
            for (int c = 0; c < 4; ++c) {
                int piv = c;
                for (int rr = c + 1; rr < 4; ++rr)
                    if (std::fabs(jm[rr][c]) > std::fabs(jm[piv][c])) piv = rr;
                if (piv != c) {
                    std::swap(jm[piv], jm[c]);
                    det = -det;
                }
                det *= jm[c][c];
                for (int rr = c + 1; rr < 4; ++rr) {
                    double f = jm[rr][c] / jm[c][c];
                    for (int cc = c; cc < 4; ++cc) jm[rr][cc] -= f * jm[c][cc];
                }
            }
            worst_jac =
                std::max(worst_jac, std::fabs(std::fabs(det) - abc::ks::ks_jacobian(u)) /
                                        abc::ks::ks_jacobian(u));
        }
    }
    rows.push_back({"ks-algebraic", worst_alg, 1e-12});
    rows.push_back({"ks-jacobian-fd", worst_jac, 1e-6});
}

void check_legendre(std::vector<CheckRow>& rows, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ul(0.7, 2.0), um(-1.0, 1.2),
        un(0.0, 3.0);
    double worst = 0.0;
    worst = std::max(worst,
                     abc::amplitude::legendre_integral_identity_check(1, 0, 0)
                         .rel_err);
    worst = std::max(worst,
                     abc::amplitude::legendre_integral_identity_check(1, 0, 1)
                         .rel_err);
    int done = 0;
    while (done < 18) {
        double lam = ul(rng), mu = um(rng), nu = un(rng);
        if (!(lam - 0.5 * mu > 0.1) || !(lam + 0.5 * mu > 0.1)) continue;
        worst = std::max(
            worst,
            abc::amplitude::legendre_integral_identity_check(lam, mu, nu)
                .rel_err);
        ++done;
    }
    rows.push_back({"legendre-integral", worst, 1e-9});
}

void check_bessel_product(std::vector<CheckRow>& rows,
                          unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uarg(0.3, 18.0), us(0.0, 3.0),
        uth(0.3, M_PI - 0.3);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
        worst = std::max(worst, abc::amplitude::bessel_product_identity_check(
                                    uarg(rng), us(rng), uth(rng), uth(rng), 30)
                                    .rel_err);
    rows.push_back({"bessel-product", worst, 1e-8});
}

void check_gamma_reduction(std::vector<CheckRow>& rows, double flux) {
    abc::spectrum::PhysParams p(1.0, -1.0, flux);
    auto fe = abc::amplitude::FixedEnergy::from_energy(p, -0.4);
    std::pair<abc::ks::SphericalPoint, abc::ks::AuxAngle> a{
        abc::ks::SphericalPoint(1.0, 1.1, 0.5), abc::ks::AuxAngle(1.7)};
    std::pair<abc::ks::SphericalPoint, abc::ks::AuxAngle> b{
        abc::ks::SphericalPoint(2.0, 2.0, 3.9), abc::ks::AuxAngle(8.2)};
    double worst = 0.0;
    for (int mm = 0; mm <= 4; ++mm)
        worst = std::max(
            worst, abc::amplitude::oscillator_sum_reduction_check(p, a, b, fe, mm));
    rows.push_back({"gamma-reduction", worst, 1e-8});
}

void check_spectrum_oracle(std::vector<CheckRow>& rows,
                           const abc::spectrum::PhysParams& p) {
    std::vector<abc::spectrum::QuantumNumbers> qns;
    for (const auto& lvl : abc::spectrum::enumerate_levels(p, 3.5))
        for (const auto& qn : lvl.members) qns.push_back(qn);
    double worst = 0.0;
    for (const auto& row :
         abc::oracle::compare_spectrum(p, qns, abc::oracle::default_grid(p)))
        worst = std::max(worst, row.rel_diff);
    rows.push_back({"spectrum-oracle", worst, 1e-4});
}

int run_check(const CommonOpts& common, const CheckOpts& opt) {
    std::vector<CheckRow> rows;
    abc::spectrum::PhysParams p(common.mass, common.coulomb, common.flux);
    if (opt.which == "all" || opt.which == "ks")
        check_ks(rows, opt.samples, common.seed);
    if (opt.which == "all" || opt.which == "legendre")
        check_legendre(rows, common.seed);
    if (opt.which == "all" || opt.which == "bessel-product")
        check_bessel_product(rows, common.seed);
    if (opt.which == "all" || opt.which == "gamma-reduction")
        check_gamma_reduction(rows, common.flux);
    if (opt.which == "all" || opt.which == "spectrum")
        check_spectrum_oracle(rows, p);
    if (rows.empty())
        throw CLI::ValidationError("--check",
                                   "unknown check '" + opt.which + "'");

    KV kv{{"command", "check"},
          {"check", opt.which},
          {"mass", fmt_double(common.mass)},
          {"coulomb", fmt_double(common.coulomb)},
          {"flux", fmt_double(common.flux)},
          {"samples", std::to_string(opt.samples)},
          {"format", common.format},
          {"seed", fmt_ull(common.seed)}};

    bool all_pass = true;
    for (const auto& r : rows) all_pass = all_pass && r.pass();

    if (common.format == "csv") {
        std::string out = csv_header_from(kv);
        out += "check,residual,tolerance,pass\n";
        for (const auto& r : rows)
            out += r.name + "," + fmt_double(r.residual) + "," +
                   fmt_double(r.tolerance) + "," + (r.pass() ? "1" : "0") + "\n";
        write_output(common, out);
    } else {
        Json root = Json::object();
        root.add("config", config_json(kv));
        Json results = Json::array();
        for (const auto& r : rows) {
            Json row = Json::object();
            row.add("check", Json::string(r.name));
            row.add("residual", Json::number(r.residual));
            row.add("tolerance", Json::number(r.tolerance));
            row.add("pass", Json::boolean_(r.pass()));
            results.push(std::move(row));
        }
        root.add("results", std::move(results));
        Json diag = Json::object();
        diag.add("all_pass", Json::boolean_(all_pass));
        root.add("diagnostics", std::move(diag));
        write_output(common, root.dump());
    }
    return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Fixed-energy amplitude and bound-state spectrum of the "
        "Aharonov-Bohm-Coulomb system (natural units, hbar = 1)"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string config_path;  // parsed manually before CLI11 runs
    app.add_option("--config", config_path,
                   "flat key=value file mirroring the flags; flags override");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--mass", common.mass, "particle mass M (> 0)");
        sub->add_option("--coulomb", common.coulomb,
                        "Coulomb strength xi (attractive for xi < 0)");
        sub->add_option("--flux", common.flux, "dimensionless flux alpha");
        sub->add_option("--format", common.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", common.out_path, "output path (default stdout)");
        sub->add_option("--seed", common.seed, "seed for randomized checks");
        sub->add_option("--config", config_path, "")->group("");
    };

    SpectrumOpts sopt;
    CLI::App* spectrum = app.add_subcommand("spectrum", "bound-state levels");
    add_common(spectrum);
    spectrum->add_option("--max-principal", sopt.max_principal,
                         "enumerate levels with principal number <= this");

    GreenOpts gopt;
    CLI::App* green = app.add_subcommand(
        "green", "fixed-energy amplitude by both evaluators");
    add_common(green);
    green->add_option("--energy", gopt.energy, "energy E < 0");
    green->add_option("--ra", gopt.ra, "r of endpoint a");
    green->add_option("--theta-a", gopt.theta_a, "theta of endpoint a");
    green->add_option("--phi-a", gopt.phi_a, "phi of endpoint a");
    green->add_option("--rb", gopt.rb, "r of endpoint b");
    green->add_option("--theta-b", gopt.theta_b, "theta of endpoint b");
    green->add_option("--phi-b", gopt.phi_b, "phi of endpoint b");
    green->add_option("--m-max", gopt.m_max, "flux-channel cutoff |m| <= m_max");
    green->add_option("--n-max", gopt.n_max, "angular-channel cutoff");
    green->add_option("--quad-rel-tol", gopt.quad_rel_tol,
                      "relative quadrature tolerance");
    green->add_option("--quad-abs-tol", gopt.quad_abs_tol,
                      "absolute quadrature tolerance");
    green->add_option("--scan", gopt.scan,
                      "scan variable: energy|ra|rb|theta-a|theta-b|phi-a|phi-b")
        ->check(CLI::IsMember({"energy", "ra", "rb", "theta-a", "theta-b",
                               "phi-a", "phi-b"}));
    green->add_option("--scan-from", gopt.scan_from, "scan start");
    green->add_option("--scan-to", gopt.scan_to, "scan end");
    green->add_option("--scan-points", gopt.scan_points, "scan record count");

    CheckOpts copt;
    CLI::App* check = app.add_subcommand("check", "identity and oracle batteries");
    add_common(check);
    check->add_option(
        "--check", copt.which,
        "all|ks|legendre|bessel-product|gamma-reduction|spectrum");
    check->add_option("--samples", copt.samples, "sample count for ks battery");

    // config-file values are injected before explicit flags; the last
    // occurrence must win for flags to override the file
    for (CLI::App* sub : {spectrum, green, check})
        for (CLI::Option* o : sub->get_options())
            o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    try {
        auto args = apply_config_file(argc, argv);
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const abc::precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand("spectrum")) return run_spectrum(common, sopt);
        if (app.got_subcommand("green")) return run_green(common, gopt);
        if (app.got_subcommand("check")) return run_check(common, copt);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const abc::precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const abc::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const abc::accuracy_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
