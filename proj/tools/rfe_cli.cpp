// Experiment runner: binds the library modules behind a config-driven CLI.
// Subcommands: census simulate tailfield timechange laplace theta ac frechet run
// Exit codes: 0 ok, 2 config error, 3 step failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rfe/cluster.hpp"
#include "rfe/extremal.hpp"
#include "rfe/field.hpp"
#include "rfe/shape.hpp"
#include "rfe/tail.hpp"

using json = nlohmann::json;
using namespace rfe;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// config plumbing
// ---------------------------------------------------------------------------

void expect_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

void validate_config(const json& cfg) {
    expect_keys(cfg, "config",
                {"model", "index_set", "order", "census", "simulate", "tailfield", "timechange",
                 "laplace", "theta", "ac", "frechet", "run", "seed", "out", "threads"});
    if (cfg.contains("model"))
        expect_keys(cfg["model"], "model",
                    {"type", "alpha", "scale", "dim", "kernel", "coeffs", "value", "rel_tol"});
    if (cfg.contains("index_set"))
        expect_keys(cfg["index_set"], "index_set",
                    {"type", "path", "extents", "stations", "periods", "generators", "offsets"});
    if (cfg.contains("order")) expect_keys(cfg["order"], "order", {"permutation"});
    if (cfg.contains("census")) expect_keys(cfg["census"], "census", {"p"});
    if (cfg.contains("simulate")) expect_keys(cfg["simulate"], "simulate", {"realizations"});
    if (cfg.contains("tailfield"))
        expect_keys(cfg["tailfield"], "tailfield",
                    {"realizations", "window_radius", "u", "exceed_size"});
    if (cfg.contains("timechange"))
        expect_keys(cfg["timechange"], "timechange",
                    {"pairs", "budget", "y_version", "b1", "b2", "c", "threshold_size"});
    if (cfg.contains("laplace"))
        expect_keys(cfg["laplace"], "laplace",
                    {"configs", "budget", "b1_grid", "c_grid", "p", "R", "min_weight",
                     "threshold_size"});
    if (cfg.contains("theta"))
        expect_keys(cfg["theta"], "theta",
                    {"variants", "tau", "realizations", "budget", "p", "R", "min_weight",
                     "threshold_size", "r_n"});
    if (cfg.contains("ac"))
        expect_keys(cfg["ac"], "ac", {"realizations", "l_grid", "eps", "tau", "pattern"});
    if (cfg.contains("frechet"))
        expect_keys(cfg["frechet"], "frechet", {"realizations", "theta", "budget"});
    if (cfg.contains("run")) expect_keys(cfg["run"], "run", {"steps"});
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const json& cfg) {
    // nlohmann objects iterate in sorted key order, so the dump (and the
    // hash) is independent of the key order in the source file
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(cfg.dump())));
    return buf;
}

// ---------------------------------------------------------------------------
// index-set ingestion / generation
// ---------------------------------------------------------------------------

IndexSet ingest_lambda(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read index-set file " + path);
    std::string line;
    int lineno = 0, k = -1;
    IndexSet out;
    std::size_t dups = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (k < 0) {
            std::string head;
            ls >> head;
            if (head.rfind("k=", 0) != 0)
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected header \"k=<dim>\"");
            try {
                k = std::stoi(head.substr(2));
            } catch (...) {
                k = 0;
            }
            if (k < 1) throw ConfigError(path + ":" + std::to_string(lineno) + ": bad dimension");
            out = IndexSet(k);
            continue;
        }
        std::vector<std::int64_t> coords;
        std::int64_t v;
        while (ls >> v) coords.push_back(v);
        if (!ls.eof() || coords.size() != static_cast<std::size_t>(k))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(k) + " integers");
        Point p(coords);
        if (out.contains(p))
            ++dups;
        else
            out.insert(p);
    }
    if (k < 0) throw ConfigError(path + ": empty index-set file");
    if (dups > 0)
        std::fprintf(stderr, "warning: %zu duplicate point(s) in %s\n", dups, path.c_str());
    if (out.empty()) throw ConfigError(path + ": no points");
    return out;
}

std::vector<Point> parse_points(const json& arr, const std::string& where) {
    std::vector<Point> out;
    if (!arr.is_array()) throw ConfigError(where + ": expected an array of points");
    for (const auto& e : arr) {
        if (!e.is_array() || e.empty()) throw ConfigError(where + ": bad point");
        std::vector<std::int64_t> c;
        for (const auto& v : e) c.push_back(v.get<std::int64_t>());
        out.push_back(Point(c));
    }
    return out;
}

IndexSet build_lambda(const json& cfg) {
    if (!cfg.contains("index_set")) throw ConfigError("missing index_set section");
    const json& s = cfg["index_set"];
    std::string type = get_or<std::string>(s, "type", "");
    if (type == "file") return ingest_lambda(get_or<std::string>(s, "path", ""));
    if (type == "hyperrectangle") {
        auto ext = get_or<std::vector<std::int64_t>>(s, "extents", {});
        if (ext.empty()) throw ConfigError("hyperrectangle: extents required");
        IndexSet out(static_cast<int>(ext.size()));
        std::vector<std::int64_t> c(ext.size(), 0);
        while (true) {
            out.insert(Point(c));
            std::size_t a = 0;
            while (a < ext.size() && ++c[a] == ext[a]) c[a++] = 0;
            if (a == ext.size()) break;
        }
        return out;
    }
    if (type == "spacetime") {
        auto stations = parse_points(s.value("stations", json::array()), "spacetime.stations");
        std::int64_t T = get_or<std::int64_t>(s, "periods", 0);
        if (stations.empty() || T < 1) throw ConfigError("spacetime: stations and periods required");
        int k = stations.front().dim() + 1;
        IndexSet out(k);
        for (const Point& st : stations)
            for (std::int64_t t = 0; t < T; ++t) {
                std::vector<std::int64_t> c(st.c);
                c.push_back(t);
                out.insert(Point(c));
            }
        return out;
    }
    if (type == "lattice") {
        auto ext = get_or<std::vector<std::int64_t>>(s, "extents", {});
        auto gens = parse_points(s.value("generators", json::array()), "lattice.generators");
        auto offs = parse_points(s.value("offsets", json::array()), "lattice.offsets");
        if (ext.empty() || gens.empty()) throw ConfigError("lattice: extents and generators required");
        int k = static_cast<int>(ext.size());
        LatticeUnion u(k);
        auto lat = Sublattice::from_generators(k, gens);
        if (offs.empty()) offs.push_back(Point::zero(k));
        for (const Point& o : offs) u.add_component(lat, o);
        IndexSet out(k);
        std::vector<std::int64_t> c(ext.size(), 0);
        while (true) {
            Point p(c);
            if (u.contains(p)) out.insert(p);
            std::size_t a = 0;
            while (a < ext.size() && ++c[a] == ext[a]) c[a++] = 0;
            if (a == ext.size()) break;
        }
        if (out.empty()) throw ConfigError("lattice: no points inside the extents");
        return out;
    }
    throw ConfigError("index_set.type must be file|hyperrectangle|spacetime|lattice");
}

FieldModel build_model(const json& cfg) {
    if (!cfg.contains("model")) throw ConfigError("missing model section");
    const json& m = cfg["model"];
    std::string type = get_or<std::string>(m, "type", "");
    auto kernel_of = [&](const char* key) {
        std::vector<std::pair<Point, double>> kern;
        if (!m.contains(key)) throw ConfigError(std::string("model: ") + key + " required");
        for (const auto& e : m[key]) {
            expect_keys(e, key, {"point", "weight"});
            auto pts = parse_points(json::array({e.at("point")}), key);
            kern.emplace_back(pts.front(), e.at("weight").get<double>());
        }
        return kern;
    };
    if (type == "iid")
        return IIDFrechet{get_or(m, "alpha", 1.0), get_or(m, "scale", 1.0),
                          get_or(m, "dim", 1)};
    if (type == "moving_maxima")
        return MovingMaxima{kernel_of("kernel"), get_or(m, "alpha", 1.0)};
    if (type == "dehaan_constant")
        return DeHaanMaxStable{v_constant(get_or(m, "value", 1.0), get_or(m, "dim", 1)),
                               get_or(m, "rel_tol", 1.0)};
    if (type == "linear")
        return LinearHeavyTail{kernel_of("coeffs"), get_or(m, "alpha", 2.0)};
    throw ConfigError("model.type must be iid|moving_maxima|dehaan_constant|linear");
}

// ---------------------------------------------------------------------------
// run context
// ---------------------------------------------------------------------------

struct Ctx {
    json cfg;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<std::string> outputs;  // files written by the current step

    std::optional<FieldModel> model_;
    std::optional<IndexSet> lambda_;
    std::optional<InvariantOrder> order_;

    const FieldModel& model() {
        if (!model_) model_ = build_model(cfg);
        return *model_;
    }
    const IndexSet& lambda() {
        if (!lambda_) lambda_ = build_lambda(cfg);
        return *lambda_;
    }
    const InvariantOrder& order() {
        if (!order_) {
            int k = lambda().dim();
            if (cfg.contains("order") && cfg["order"].contains("permutation"))
                order_ = InvariantOrder::permuted_lexicographic(
                    cfg["order"]["permutation"].get<std::vector<int>>());
            else
                order_ = InvariantOrder::lexicographic(k);
            if (order_->dim() != k) throw ConfigError("order permutation/index_set dim mismatch");
        }
        return *order_;
    }
};

void write_text(Ctx& c, const std::string& name, const std::string& body) {
    std::filesystem::create_directories(c.out_dir);
    std::string path = c.out_dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StepError("cannot write " + path);
    out << body;
    c.outputs.push_back(path);
}

void write_json(Ctx& c, const std::string& name, const json& j) {
    write_text(c, name, j.dump(2) + "\n");
}

std::string num(double v) {
    char b[40];
    std::snprintf(b, sizeof(b), "%.10g", v);
    return b;
}

template <class F>
void parallel_for(std::size_t n, int threads, F f) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    };
    std::vector<std::thread> pool;
    int nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

// slot-per-index writes keep the result independent of thread scheduling
std::vector<FieldRealization> simulate_many(Ctx& c, const IndexSet& w, std::size_t reps,
                                            const std::string& stream) {
    std::vector<FieldRealization> out(reps);
    parallel_for(reps, c.threads, [&](std::size_t i) {
        out[i] = simulate(c.model(), w, substream_seed(c.seed, stream, i));
    });
    return out;
}

IndexSet bounding_rect(const IndexSet& s, std::vector<std::int64_t>* extents = nullptr) {
    int k = s.dim();
    std::vector<std::int64_t> lo(static_cast<std::size_t>(k), INT64_MAX),
        hi(static_cast<std::size_t>(k), INT64_MIN);
    for (const Point& p : s.points())
        for (int a = 0; a < k; ++a) {
            lo[static_cast<std::size_t>(a)] = std::min(lo[static_cast<std::size_t>(a)], p[a]);
            hi[static_cast<std::size_t>(a)] = std::max(hi[static_cast<std::size_t>(a)], p[a]);
        }
    if (extents) {
        extents->clear();
        for (int a = 0; a < k; ++a)
            extents->push_back(hi[static_cast<std::size_t>(a)] -
                               lo[static_cast<std::size_t>(a)] + 1);
    }
    IndexSet out(k);
    std::vector<std::int64_t> c = lo;
    while (true) {
        out.insert(Point(c));
        int a = 0;
        while (a < k) {
            auto ia = static_cast<std::size_t>(a);
            if (++c[ia] <= hi[ia]) break;
            c[ia] = lo[ia];
            ++a;
        }
        if (a == k) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// SVG emission (self-contained, fixed 640x420 canvas)
// ---------------------------------------------------------------------------

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> pts;
    bool markers = true;
};

void svg_chart(Ctx& c, const std::string& name, const std::string& title,
               const std::string& xlabel, const std::string& ylabel,
               const std::vector<Series>& series) {
    const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s.pts) {
            xmin = std::min(xmin, x), xmax = std::max(xmax, x);
            ymin = std::min(ymin, y), ymax = std::max(ymax, y);
        }
    if (xmin > xmax) xmin = 0, xmax = 1;
    if (ymin > ymax) ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
    static const char* colors[] = {"#1f6fb2", "#c23b22", "#3a923a", "#8155ba", "#b28b1f"};
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double x = xmin + (xmax - xmin) * i / 4.0, y = ymin + (ymax - ymin) * i / 4.0;
        s << "<text x=\"" << px(x) << "\" y=\"" << H - B + 18
          << "\" text-anchor=\"middle\" font-size=\"11\">" << num(x) << "</text>\n";
        s << "<text x=\"" << L - 8 << "\" y=\"" << py(y) + 4
          << "\" text-anchor=\"end\" font-size=\"11\">" << num(y) << "</text>\n";
    }
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
    s << "<text x=\"16\" y=\"" << (T + H - B) / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* col = colors[i % 5];
        s << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : series[i].pts) s << px(x) << "," << py(y) << " ";
        s << "\"/>\n";
        if (series[i].markers)
            for (auto [x, y] : series[i].pts)
                s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\""
                  << col << "\"/>\n";
        s << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 16 + 16 * static_cast<double>(i)
          << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << col << "\">" << series[i].label
          << "</text>\n";
    }
    s << "</svg>\n";
    write_text(c, name, s.str());
}

struct PanelBar {
    std::string title;
    double emp = 0, emp_se = 0, lim = 0, lim_se = 0;
};

void svg_panels(Ctx& c, const std::string& name, const std::string& title, std::size_t cols,
                const std::vector<PanelBar>& panels) {
    std::size_t rows = (panels.size() + cols - 1) / cols;
    const double PW = 200, PH = 160, M = 20;
    double W = M + static_cast<double>(cols) * PW, H = 40 + static_cast<double>(rows) * PH;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        double x0 = M + static_cast<double>(i % cols) * PW,
               y0 = 40 + static_cast<double>(i / cols) * PH;
        const auto& p = panels[i];
        double top = std::max({p.emp + 2 * p.emp_se, p.lim + 2 * p.lim_se, 1e-12});
        auto bar = [&](double off, double v, double se, const char* col) {
            double h = v / top * (PH - 60);
            s << "<rect x=\"" << x0 + off << "\" y=\"" << y0 + PH - 30 - h
              << "\" width=\"40\" height=\"" << h << "\" fill=\"" << col << "\"/>\n";
            double e = se / top * (PH - 60);
            s << "<line x1=\"" << x0 + off + 20 << "\" y1=\"" << y0 + PH - 30 - h - e
              << "\" x2=\"" << x0 + off + 20 << "\" y2=\"" << y0 + PH - 30 - h + e
              << "\" stroke=\"black\"/>\n";
        };
        bar(40, p.emp, p.emp_se, "#1f6fb2");
        bar(100, p.lim, p.lim_se, "#c23b22");
        s << "<text x=\"" << x0 + PW / 2 << "\" y=\"" << y0 + 14
          << "\" text-anchor=\"middle\" font-size=\"11\">" << p.title << "</text>\n";
        s << "<text x=\"" << x0 + 60 << "\" y=\"" << y0 + PH - 14
          << "\" text-anchor=\"middle\" font-size=\"10\">emp " << num(p.emp) << "</text>\n";
        s << "<text x=\"" << x0 + 120 << "\" y=\"" << y0 + PH - 4
          << "\" text-anchor=\"middle\" font-size=\"10\">lim " << num(p.lim) << "</text>\n";
    }
    s << "</svg>\n";
    write_text(c, name, s.str());
}

// ---------------------------------------------------------------------------
// shared shape / sampler plumbing
// ---------------------------------------------------------------------------

struct ShapeBundle {
    std::vector<ShapeD> shapes;      // weight-renormalized
    std::vector<double> weights;
    double ignored_mass = 0.0;       // census mass below min_weight
};

ShapeBundle analyzed_shapes(Ctx& c, std::int64_t p, double min_weight) {
    auto cen = census(c.lambda(), p, c.order());
    ShapeBundle out;
    double kept = 0.0;
    for (std::size_t i = 0; i < cen.entries.size(); ++i) {
        double w = cen.weight(i);
        if (w < min_weight) {
            out.ignored_mass += w;
            continue;
        }
        out.shapes.push_back(infer_shape(cen.entries[i].shape, p, c.order()));
        out.weights.push_back(w);
        kept += w;
    }
    if (out.shapes.empty()) throw StepError("no census shape above the weight threshold");
    for (double& w : out.weights) w /= kept;
    return out;
}

bool has_theta_oracle(const FieldModel& m) {
    return std::holds_alternative<IIDFrechet>(m) || std::holds_alternative<MovingMaxima>(m);
}

// Θ sampler valid on K_radius: analytic when the model admits one, otherwise
// resampled from simulated conditional exceedance snapshots.
ThetaSampler make_theta(Ctx& c, std::int64_t radius, std::size_t threshold_size,
                        const std::string& stream) {
    if (has_theta_oracle(c.model())) return spectral_tail_oracle(c.model());
    double u = normalizer(marginal_tail(c.model()), static_cast<double>(threshold_size));
    int k = model_dim(c.model());
    auto w = hypercube(radius, k);
    auto sim_window = hypercube(2 * radius, k);
    std::vector<FieldRealization> reals;
    for (int batch = 0; batch < 8; ++batch) {
        for (std::size_t i = 0; i < 50; ++i)
            reals.push_back(simulate(c.model(), sim_window,
                                     substream_seed(c.seed, stream, reals.size())));
        try {
            auto est = estimate_spectral_tail(reals, u, w, model_alpha(c.model()));
            if (est.samples.size() >= 400) return sampler_from_estimate(est);
        } catch (const std::runtime_error&) {
            // not enough exceedances yet; keep simulating
        }
    }
    auto est = estimate_spectral_tail(reals, u, w, model_alpha(c.model()));
    return sampler_from_estimate(est);
}

double a_n(Ctx& c, double tau = 1.0) {
    return normalizer(marginal_tail(c.model()),
                      static_cast<double>(c.lambda().size()) / tau);
}

// ---------------------------------------------------------------------------
// steps
// ---------------------------------------------------------------------------

void step_census(Ctx& c) {
    const json& s = c.cfg.value("census", json::object());
    auto ps = get_or<std::vector<std::int64_t>>(s, "p", {1, 2});
    std::sort(ps.begin(), ps.end());
    std::vector<ShapeCensus> orth, xi;
    json jp = json::array();
    std::ostringstream csv;
    csv << "p,kind,key,count,weight\n";
    for (std::int64_t p : ps) {
        orth.push_back(census(c.lambda(), p, c.order()));
        xi.push_back(census_xi(c.lambda(), p));
        for (const auto* cen : {&orth.back(), &xi.back()}) {
            json je = json::array();
            for (std::size_t i = 0; i < cen->entries.size(); ++i) {
                je.push_back({{"key", cen->entries[i].shape.canonical_key()},
                              {"count", cen->entries[i].count},
                              {"weight", cen->weight(i)}});
                csv << p << "," << (cen->upper_orthant ? "orthant" : "full") << ",\""
                    << cen->entries[i].shape.canonical_key() << "\"," << cen->entries[i].count
                    << "," << num(cen->weight(i)) << "\n";
            }
            jp.push_back({{"p", p},
                          {"kind", cen->upper_orthant ? "orthant" : "full"},
                          {"total", cen->total},
                          {"shapes", je}});
        }
    }
    auto wid = weight_identities(orth, xi, c.order());
    auto gam = gamma_star_check(c.lambda(), ps.back(), c.order());
    json jg = json::array();
    for (const auto& r : gam.rows)
        jg.push_back({{"d_key", r.d_key},
                      {"xi_key", r.xi_key},
                      {"lambda", r.lambda},
                      {"gamma_star", r.gamma_star},
                      {"pattern_size", r.n},
                      {"matched", r.matched}});
    write_json(c, "census.json",
               {{"lambda_size", c.lambda().size()},
                {"censuses", jp},
                {"identities",
                 {{"count_partition_exact", wid.count_partition_exact},
                  {"refinement_violation", wid.refinement_violation},
                  {"xi_refinement_violation", wid.xi_refinement_violation},
                  {"gamma_star_residual", gam.residual},
                  {"gamma_star_sum", gam.sum},
                  {"matched_weight", gam.matched_weight}}},
                {"gamma_rows", jg}});
    write_text(c, "census.csv", csv.str());
}

void step_simulate(Ctx& c) {
    const json& s = c.cfg.value("simulate", json::object());
    auto reps = get_or<std::size_t>(s, "realizations", 10);
    auto reals = simulate_many(c, c.lambda(), reps, "simulate.real");
    double a = a_n(c);
    std::ostringstream csv;
    csv << "realization,seed,max_abs,exceed_a_n,truncation_bound\n";
    double grand_max = 0.0;
    for (std::size_t i = 0; i < reals.size(); ++i) {
        double mx = 0.0;
        std::size_t ex = 0;
        for (double v : reals[i].values) {
            mx = std::max(mx, std::abs(v));
            if (std::abs(v) > a) ++ex;
        }
        grand_max = std::max(grand_max, mx);
        csv << i << "," << reals[i].seed << "," << num(mx) << "," << ex << ","
            << num(reals[i].truncation_bound) << "\n";
    }
    write_text(c, "simulate.csv", csv.str());
    write_json(c, "simulate.json", {{"realizations", reps},
                                    {"lambda_size", c.lambda().size()},
                                    {"a_n", a},
                                    {"max_abs", grand_max}});
}

void step_tailfield(Ctx& c) {
    const json& s = c.cfg.value("tailfield", json::object());
    auto reps = get_or<std::size_t>(s, "realizations", 100);
    auto wrad = get_or<std::int64_t>(s, "window_radius", 2);
    double alpha = model_alpha(c.model());
    double u = s.contains("u")
                   ? s["u"].get<double>()
                   : normalizer(marginal_tail(c.model()),
                                get_or<double>(s, "exceed_size", 100.0));
    auto reals = simulate_many(c, c.lambda(), reps, "tailfield.real");
    auto est = estimate_spectral_tail(reals, u, hypercube(wrad, c.lambda().dim()), alpha);

    std::vector<double> radial;
    for (const auto& sm : est.samples) radial.push_back(sm.radial);
    double ks = ks_distance(radial, [alpha](double y) {
        return y < 1.0 ? 0.0 : 1.0 - std::pow(y, -alpha);
    });
    std::ostringstream csv;
    csv << "offset,mean_abs_theta\n";
    for (std::size_t i = 0; i < est.window.size(); ++i) {
        double m = 0.0;
        for (const auto& sm : est.samples) m += std::abs(sm.values[i]);
        csv << "\"" << est.window[i].str() << "\"," << num(m / static_cast<double>(est.samples.size()))
            << "\n";
    }
    write_text(c, "tailfield.csv", csv.str());
    write_json(c, "tailfield.json",
               {{"threshold", u},
                {"samples", est.samples.size()},
                {"radial_ks_vs_pareto", ks},
                {"dkw_band", dkw_band(est.samples.size())},
                {"radial_pass", ks <= dkw_band(est.samples.size())}});
}

void step_timechange(Ctx& c) {
    const json& s = c.cfg.value("timechange", json::object());
    int k = model_dim(c.model());
    std::vector<std::pair<Point, Point>> pairs;
    if (s.contains("pairs")) {
        for (const auto& e : s["pairs"]) {
            auto pts = parse_points(e, "timechange.pairs");
            if (pts.size() != 2) throw ConfigError("timechange.pairs: expected [s, t] pairs");
            pairs.emplace_back(pts[0], pts[1]);
        }
    } else {
        auto unit = [&](std::int64_t v) {
            std::vector<std::int64_t> cc(static_cast<std::size_t>(k), 0);
            cc[0] = v;
            return Point(cc);
        };
        pairs = {{unit(0), unit(1)}, {unit(1), unit(1)}, {unit(1), unit(2)}};
    }
    auto budget = get_or<std::size_t>(s, "budget", 50000);
    bool yv = get_or(s, "y_version", false);
    BumpG g{get_or(s, "b1", 0.5), get_or(s, "b2", 4.0), get_or(s, "c", 1.0)};
    std::int64_t rad = 1;
    for (auto& [sp, tp] : pairs) rad = std::max(rad, sp.inf_norm() + tp.inf_norm());
    auto th = make_theta(c, 2 * rad, get_or<std::size_t>(s, "threshold_size", 200),
                         "timechange.theta");
    Rng rng(substream_seed(c.seed, "timechange.mc"));
    json rows = json::array();
    std::ostringstream csv;
    csv << "s,t,lhs,rhs,se,pass\n";
    bool all_pass = true;
    for (auto& [sp, tp] : pairs) {
        auto rep = time_change_check(th, g, sp, tp, model_alpha(c.model()), budget, rng, yv);
        rows.push_back({{"s", sp.str()},
                        {"t", tp.str()},
                        {"lhs", rep.lhs},
                        {"rhs", rep.rhs},
                        {"se", rep.se},
                        {"pass", rep.pass()}});
        csv << "\"" << sp.str() << "\",\"" << tp.str() << "\"," << num(rep.lhs) << ","
            << num(rep.rhs) << "," << num(rep.se) << "," << (rep.pass() ? 1 : 0) << "\n";
        all_pass = all_pass && rep.pass();
    }
    write_text(c, "timechange.csv", csv.str());
    write_json(c, "timechange.json",
               {{"y_version", yv}, {"budget", budget}, {"all_pass", all_pass}, {"rows", rows}});
}

void step_laplace(Ctx& c) {
    const json& s = c.cfg.value("laplace", json::object());
    auto configs = get_or<std::size_t>(s, "configs", 100);
    auto budget = get_or<std::size_t>(s, "budget", 40000);
    auto b1s = get_or<std::vector<double>>(s, "b1_grid", {0.4, 0.6, 0.9});
    auto cs = get_or<std::vector<double>>(s, "c_grid", {0.5, 1.0, 2.0});
    auto p = get_or<std::int64_t>(s, "p", 2);
    auto R = get_or<std::int64_t>(s, "R", 8);
    double alpha = model_alpha(c.model());
    double a = a_n(c);

    double floor = *std::min_element(b1s.begin(), b1s.end());
    auto reals = simulate_many(c, c.lambda(), configs, "laplace.real");
    std::vector<PointConfig> pcs;
    for (const auto& r : reals) pcs.push_back(exceedance_process(r, c.lambda(), a, floor));

    auto bundle = analyzed_shapes(c, p, get_or(s, "min_weight", 0.01));
    auto th = make_theta(c, R, get_or<std::size_t>(s, "threshold_size", 200), "laplace.theta");
    std::vector<LimitShape> shapes;
    for (std::size_t j = 0; j < bundle.shapes.size(); ++j) {
        LimitShape ls;
        ls.d_window = bundle.shapes[j].repr.positive_part(R, c.order()).points();
        ls.weight = bundle.weights[j];
        ls.theta = th;
        shapes.push_back(std::move(ls));
    }

    Rng rng(substream_seed(c.seed, "laplace.mc"));
    json rows = json::array();
    std::vector<PanelBar> panels;
    std::ostringstream csv;
    csv << "b1,c,empirical,empirical_se,limit,limit_se,gap_sigmas,truncation_residual\n";
    for (double b1 : b1s)
        for (double cc : cs) {
            BumpG g{b1, 4.0, cc};
            auto emp = empirical_laplace(pcs, g);
            auto lim = limit_laplace_psi_l(shapes, g, alpha, budget, rng);
            double joint = std::sqrt(emp.se * emp.se + lim.se * lim.se);
            double gap = joint > 0 ? std::abs(emp.mean - lim.value) / joint : 0.0;
            rows.push_back({{"b1", b1},
                            {"c", cc},
                            {"empirical", emp.mean},
                            {"empirical_se", emp.se},
                            {"limit", lim.value},
                            {"limit_se", lim.se},
                            {"limit_product_form", lim.value_product_form},
                            {"gap_sigmas", gap},
                            {"truncation_residual", lim.truncation_residual}});
            csv << num(b1) << "," << num(cc) << "," << num(emp.mean) << "," << num(emp.se) << ","
                << num(lim.value) << "," << num(lim.se) << "," << num(gap) << ","
                << num(lim.truncation_residual) << "\n";
            panels.push_back({"b1=" + num(b1) + " c=" + num(cc), emp.mean, emp.se, lim.value,
                              lim.se});
        }
    write_text(c, "laplace.csv", csv.str());
    write_json(c, "laplace.json", {{"a_n", a},
                                   {"configs", configs},
                                   {"ignored_census_mass", bundle.ignored_mass},
                                   {"rows", rows}});
    svg_panels(c, "laplace.svg", "Laplace functional: empirical vs limit", cs.size(), panels);
}

json theta_entry(const std::string& variant, double value, double se, double truncation,
                 bool ac_pass, double summability) {
    return {{"variant", variant},
            {"value", value},
            {"se", se},
            {"truncation", truncation},
            {"diagnostics", {{"ac_pass", ac_pass}, {"summability_residual", summability}}}};
}

// shared anti-clustering probe reused by the theta report diagnostics
AcCurve run_ac(Ctx& c, const json& s, const std::string& stream) {
    auto reps = get_or<std::size_t>(s, "realizations", 20000);
    double tau = get_or(s, "tau", 4.0);
    auto grid = get_or<std::vector<std::int64_t>>(s, "l_grid", {0, 1, 2, 4, 8});
    double eps = get_or(s, "eps", 0.05);
    std::vector<Point> pattern;
    if (s.contains("pattern")) pattern = parse_points(s["pattern"], "ac.pattern");

    std::vector<std::int64_t> ext;
    bounding_rect(c.lambda(), &ext);
    IndexSet block(c.lambda().dim());
    std::vector<std::int64_t> bext;
    for (std::int64_t e : ext)
        bext.push_back(std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::sqrt(static_cast<double>(e)))));
    std::vector<std::int64_t> cur(bext.size(), 0);
    while (true) {
        block.insert(Point(cur));
        std::size_t a = 0;
        while (a < bext.size() && ++cur[a] == bext[a]) cur[a++] = 0;
        if (a == bext.size()) break;
    }
    double u = a_n(c, tau);
    auto reals = simulate_many(c, block, reps, stream);
    return ac_diagnostic(reals, u, grid, c.order(), pattern, eps);
}

void step_ac(Ctx& c) {
    const json& s = c.cfg.value("ac", json::object());
    auto curve = run_ac(c, s, "ac.real");
    json rows = json::array();
    std::ostringstream csv;
    csv << "l,value,anchors\n";
    Series ser{"conditional exceedance", {}, true};
    for (const auto& pt : curve.points) {
        rows.push_back({{"l", pt.l}, {"value", pt.value}, {"anchors", pt.anchors}});
        csv << pt.l << "," << num(pt.value) << "," << pt.anchors << "\n";
        ser.pts.emplace_back(static_cast<double>(pt.l), pt.value);
    }
    write_text(c, "ac.csv", csv.str());
    write_json(c, "ac.json", {{"eps", curve.eps}, {"pass", curve.pass}, {"rows", rows}});
    svg_chart(c, "ac.svg", "Anti-clustering decay", "l", "P(far exceedance | anchor)", {ser});
}

void step_theta(Ctx& c) {
    const json& s = c.cfg.value("theta", json::object());
    auto variants = get_or<std::vector<std::string>>(
        s, "variants", {"block", "u_index", "lattice", "index4"});
    auto taus = get_or<std::vector<double>>(s, "tau", {0.5, 1.0, 2.0});
    auto reps = get_or<std::size_t>(s, "realizations", 200);
    auto budget = get_or<std::size_t>(s, "budget", 20000);
    auto p = get_or<std::int64_t>(s, "p", 2);
    auto R = get_or<std::int64_t>(s, "R", 8);
    double alpha = model_alpha(c.model());
    auto threshold_size = get_or<std::size_t>(s, "threshold_size", 200);

    bool ac_pass = false;
    try {
        ac_pass = run_ac(c, c.cfg.value("ac", json::object()), "theta.ac").pass;
    } catch (const std::runtime_error&) {
        ac_pass = false;  // conditioning event never observed at this budget
    }

    json entries = json::array();
    auto want = [&](const std::string& v) {
        return std::find(variants.begin(), variants.end(), v) != variants.end();
    };

    std::optional<ShapeBundle> bundle;
    auto shapes_of = [&]() -> ShapeBundle& {
        if (!bundle) bundle = analyzed_shapes(c, p, get_or(s, "min_weight", 0.01));
        return *bundle;
    };
    std::optional<ThetaSampler> th;
    auto theta_of = [&]() -> ThetaSampler& {
        if (!th) th = make_theta(c, R, threshold_size, "theta.sampler");
        return *th;
    };

    if (want("block")) {
        std::vector<std::int64_t> ext;
        bounding_rect(c.lambda(), &ext);
        std::int64_t rn = s.contains("r_n")
                              ? s["r_n"].get<std::int64_t>()
                              : std::max<std::int64_t>(
                                    1, static_cast<std::int64_t>(std::sqrt(static_cast<double>(
                                           *std::min_element(ext.begin(), ext.end())))));
        auto reals = simulate_many(c, c.lambda(), reps, "theta.block.real");
        for (double tau : taus) {
            auto est = block_theta(reals, rn, a_n(c, tau));
            json e = theta_entry("block", est.value, est.se, static_cast<double>(rn), ac_pass, 0.0);
            e["tau"] = tau;
            entries.push_back(e);
        }
    }

    // MC residual of the truncated sup: mass of Σ E|Θ_t|^α outside K_{R/2}
    auto summability = [&](const std::vector<std::vector<Point>>& windows,
                           const std::vector<double>& ws) {
        Rng rng(substream_seed(c.seed, "theta.summability"));
        double total = 0.0;
        const std::size_t n = 2000;
        for (std::size_t j = 0; j < windows.size(); ++j) {
            std::vector<Point> far;
            for (const Point& t : windows[j])
                if (t.inf_norm() > R / 2) far.push_back(t);
            if (far.empty()) continue;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                auto v = theta_of().sample(rng, far);
                for (double x : v) acc += std::pow(std::abs(x), alpha);
            }
            total += ws[j] * acc / static_cast<double>(n);
        }
        return total;
    };

    if (want("u_index")) {
        auto& b = shapes_of();
        std::vector<std::pair<std::vector<Point>, double>> dws;
        std::vector<std::vector<Point>> windows;
        for (std::size_t j = 0; j < b.shapes.size(); ++j) {
            auto pts = b.shapes[j].repr.positive_part(R, c.order()).points();
            dws.emplace_back(pts, b.weights[j]);
            windows.push_back(pts);
        }
        Rng rng(substream_seed(c.seed, "theta.u_index"));
        auto est = theta_u_index(theta_of(), dws, alpha, budget, rng);
        double resid = summability(windows, b.weights);
        entries.push_back(theta_entry("u_index", est.sup_diff, est.sup_diff_se,
                                      static_cast<double>(R), ac_pass, resid));
        entries.push_back(theta_entry("u_index_prob", est.prob_form, est.prob_form_se,
                                      static_cast<double>(R), ac_pass, resid));
    }

    if (want("lattice")) {
        auto& b = shapes_of();
        std::vector<LatticeShape> ls;
        std::vector<std::vector<Point>> windows;
        bool lattice_ok = true;
        std::string why;
        for (std::size_t j = 0; j < b.shapes.size(); ++j) {
            auto xi = xi_structure(b.shapes[j], c.order());
            if (!xi.lattice_case) {
                lattice_ok = false;
                why = "non-lattice structure; use the upsilon_index4 variant";
                break;
            }
            auto win = xi.xi_star.intersect_cube(R).points();
            ls.push_back({win, b.weights[j], 1});
            windows.push_back(win);
        }
        if (lattice_ok) {
            Rng rng(substream_seed(c.seed, "theta.lattice"));
            auto f = theta_lattice_forms(theta_of(), ls, alpha, c.order(), budget, rng);
            double resid = summability(windows, b.weights);
            entries.push_back(theta_entry("lattice_Q", f.q_form, f.q_se,
                                          static_cast<double>(R), ac_pass, resid));
            entries.push_back(theta_entry("lattice_ratio", f.ratio_form, f.ratio_se,
                                          static_cast<double>(R), ac_pass, resid));
            entries.push_back(theta_entry("lattice_Tstar", f.argmax_form, f.argmax_se,
                                          static_cast<double>(R), ac_pass, resid));
            entries.back()["max_pairwise_gap"] = f.max_gap;
            entries.back()["max_pairwise_gap_se"] = f.max_gap_se;
        } else {
            entries.push_back({{"variant", "lattice_Q"}, {"error", why}});
        }
    }

    if (want("index4")) {
        auto gam = gamma_star_check(c.lambda(), p, c.order());
        auto& b = shapes_of();
        std::vector<Index4Shape> i4;
        std::set<std::string> seen_xi;
        double miss = 0.0;
        for (std::size_t j = 0; j < b.shapes.size(); ++j) {
            auto xi = xi_structure(b.shapes[j], c.order());
            std::string key = xi.xi_star.intersect_cube(p).canonical_key();
            if (!seen_xi.insert(key).second) continue;  // one row per Ξ* class
            double gamma = 0.0;
            for (const auto& row : gam.rows)
                if (row.xi_key == key && row.matched) gamma = row.gamma_star;
            if (gamma <= 0.0) continue;
            Index4Shape sh;
            sh.e_set = xi.e_set.points();
            sh.lattice_window = b.shapes[j].L.enumerate(Point::zero(c.lambda().dim()), R);
            sh.weight = gamma * static_cast<double>(xi.n);
            if (xi.lattice_case) {
                sh.theta = theta_of();
            } else {
                // pattern-anchored tail field, resampled from simulation
                double u = normalizer(marginal_tail(c.model()),
                                      static_cast<double>(threshold_size));
                std::int64_t d = 0;
                for (const Point& z : sh.e_set) d = std::max(d, z.inf_norm());
                auto w = hypercube(R + d, c.lambda().dim());
                auto reals = simulate_many(c, hypercube(2 * (R + d), c.lambda().dim()), 200,
                                           "theta.index4.real");
                auto est = estimate_upsilon_tail(
                    reals, Modulus::alpha_norm(alpha, IndexSet(c.lambda().dim(), sh.e_set)),
                    u, w, alpha);
                sh.theta = sampler_from_estimate(est);
            }
            i4.push_back(std::move(sh));
        }
        if (i4.empty()) {
            entries.push_back(
                {{"variant", "upsilon_index4"}, {"error", "no matched pattern structures"}});
        } else {
            Rng rng(substream_seed(c.seed, "theta.index4"));
            auto est = theta_index4(i4, alpha, c.order(), budget, rng);
            miss = est.truncation_miss_rate;
            json e = theta_entry("upsilon_index4", est.value, est.se, static_cast<double>(R),
                                 ac_pass, 0.0);
            e["truncation_miss_rate"] = miss;
            entries.push_back(e);
        }
    }

    std::ostringstream csv;
    csv << "variant,value,se,truncation,ac_pass,summability_residual\n";
    for (const auto& e : entries) {
        if (e.contains("error")) continue;
        csv << e["variant"].get<std::string>() << "," << num(e["value"].get<double>()) << ","
            << num(e["se"].get<double>()) << "," << num(e["truncation"].get<double>()) << ","
            << (e["diagnostics"]["ac_pass"].get<bool>() ? 1 : 0) << ","
            << num(e["diagnostics"]["summability_residual"].get<double>()) << "\n";
    }
    write_text(c, "theta.csv", csv.str());
    write_json(c, "theta.json", {{"alpha", alpha}, {"entries", entries}});
}

void step_frechet(Ctx& c) {
    const json& s = c.cfg.value("frechet", json::object());
    auto reps = get_or<std::size_t>(s, "realizations", 500);
    double alpha = model_alpha(c.model());
    double a = a_n(c);
    auto reals = simulate_many(c, c.lambda(), reps, "frechet.real");
    std::vector<double> maxima;
    for (const auto& r : reals) {
        double mx = 0.0;
        for (double v : r.values) mx = std::max(mx, std::abs(v));
        maxima.push_back(mx / a);
    }
    double theta_hat;
    if (s.contains("theta")) {
        theta_hat = s["theta"].get<double>();
    } else {
        // plug-in from the spectral representation of the index
        auto bundle = analyzed_shapes(c, 2, 0.01);
        std::vector<std::pair<std::vector<Point>, double>> dws;
        for (std::size_t j = 0; j < bundle.shapes.size(); ++j)
            dws.emplace_back(bundle.shapes[j].repr.positive_part(8, c.order()).points(),
                             bundle.weights[j]);
        Rng rng(substream_seed(c.seed, "frechet.theta"));
        auto th = make_theta(c, 8, 200, "frechet.sampler");
        theta_hat = theta_u_index(th, dws, alpha, get_or<std::size_t>(s, "budget", 20000), rng)
                        .sup_diff;
    }
    auto gof = frechet_fit(maxima, alpha, theta_hat);

    std::sort(maxima.begin(), maxima.end());
    std::ostringstream csv;
    csv << "empirical_quantile,theoretical_quantile\n";
    Series pts{"quantiles", {}, true}, diag{"y=x", {}, false};
    for (std::size_t i = 0; i < maxima.size(); ++i) {
        double q = (static_cast<double>(i) + 0.5) / static_cast<double>(maxima.size());
        double theo = std::pow(-theta_hat / std::log(q), 1.0 / alpha);
        csv << num(maxima[i]) << "," << num(theo) << "\n";
        if (i % std::max<std::size_t>(1, maxima.size() / 200) == 0)
            pts.pts.emplace_back(theo, maxima[i]);
    }
    if (!pts.pts.empty()) {
        diag.pts.emplace_back(pts.pts.front().first, pts.pts.front().first);
        diag.pts.emplace_back(pts.pts.back().first, pts.pts.back().first);
    }
    write_text(c, "frechet_qq.csv", csv.str());
    write_json(c, "frechet.json", {{"theta_hat", theta_hat},
                                   {"a_n", a},
                                   {"ks", gof.ks},
                                   {"dkw_band", gof.band},
                                   {"pass", gof.pass},
                                   {"realizations", reps}});
    svg_chart(c, "frechet_qq.svg", "Scaled maxima vs powered Frechet", "theoretical", "empirical",
              {diag, pts});
}

// canonical step order for run; each runs only when configured/selected
const std::vector<std::pair<std::string, void (*)(Ctx&)>> kSteps = {
    {"census", step_census},     {"simulate", step_simulate}, {"tailfield", step_tailfield},
    {"timechange", step_timechange}, {"laplace", step_laplace},   {"theta", step_theta},
    {"ac", step_ac},             {"frechet", step_frechet},
};

int run_all(Ctx& c) {
    std::vector<std::string> selected;
    if (c.cfg.contains("run") && c.cfg["run"].contains("steps"))
        selected = c.cfg["run"]["steps"].get<std::vector<std::string>>();
    else
        for (const auto& [name, fn] : kSteps)
            if (c.cfg.contains(name)) selected.push_back(name);
    for (const auto& name : selected) {
        bool known = false;
        for (const auto& [n, fn] : kSteps) known = known || n == name;
        if (!known) throw ConfigError("run.steps: unknown step \"" + name + "\"");
    }
    json steps = json::array();
    for (const auto& [name, fn] : kSteps) {
        if (std::find(selected.begin(), selected.end(), name) == selected.end()) continue;
        c.outputs.clear();
        auto t0 = std::chrono::steady_clock::now();
        try {
            fn(c);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "step failed: %s: %s\n", name.c_str(), e.what());
            return 3;
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& f : c.outputs)
            if (!std::filesystem::exists(f) || std::filesystem::file_size(f) == 0)
                throw StepError("declared output missing or empty: " + f);
        steps.push_back({{"name", name}, {"seconds", secs}, {"outputs", c.outputs}});
    }
    c.outputs.clear();
    write_json(c, "manifest.json", {{"config_hash", config_hash(c.cfg)},
                                    {"version", kVersion},
                                    {"seed", c.seed},
                                    {"threads", c.threads},
                                    {"steps", steps}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary-field extremes experiment runner"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_flag;
    std::optional<std::uint64_t> seed_flag;
    std::optional<int> threads_flag;
    app.add_option("--config", config_path, "experiment config (json)")->required();
    app.add_option("--seed", seed_flag, "root seed (overrides config)");
    app.add_option("--out", out_flag, "output directory (overrides config)");
    app.add_option("--threads", threads_flag, "worker threads (overrides config)");
    std::vector<std::string> names = {"census", "simulate", "tailfield", "timechange",
                                      "laplace", "theta", "ac", "frechet", "run"};
    for (const auto& n : names) app.add_subcommand(n);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Ctx ctx;
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config " + config_path);
        try {
            ctx.cfg = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse: ") + e.what());
        }
        validate_config(ctx.cfg);
        ctx.seed = seed_flag ? *seed_flag : get_or<std::uint64_t>(ctx.cfg, "seed", 1);
        ctx.out_dir = !out_flag.empty() ? out_flag : get_or<std::string>(ctx.cfg, "out", "out");
        ctx.threads = threads_flag ? *threads_flag : get_or(ctx.cfg, "threads", 1);

        std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "run") return run_all(ctx);
        for (const auto& [name, fn] : kSteps)
            if (name == sub) {
                fn(ctx);
                return 0;
            }
        throw ConfigError("unknown subcommand " + sub);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "step failure: %s\n", e.what());
        return 3;
    }
}
