#include "sevo/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sevo {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string trace_to_csv(const SimulationTrace& trace) {
    std::ostringstream os;
    os << "t,L2,Hsigma_dot,Linf,Lq_m1,zero_mode,h_used,blowup_flag\n";
    for (const auto& s : trace.samples) {
        const bool flag = trace.blowup_flag && s.t >= trace.t_blow - 1e-12;
        os << format_double(s.t) << ',' << format_double(s.l2) << ','
           << format_double(s.hsigma) << ',' << format_double(s.linf) << ','
           << format_double(s.lq_m1) << ',' << format_double(s.zero_mode) << ','
           << format_double(s.h_used) << ',' << (flag ? 1 : 0) << '\n';
    }
    return os.str();
}

void write_trace_csv(const SimulationTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << trace_to_csv(trace);
}

void write_field_binary(const Field& f, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    const auto& g = *f.grid;
    const std::int32_t dim = g.dim;
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    for (int d = 0; d < g.dim; ++d) {
        const std::int32_t N = g.points;
        out.write(reinterpret_cast<const char*>(&N), sizeof(N));
    }
    const double L = g.half_length;
    out.write(reinterpret_cast<const char*>(&L), sizeof(L));
    auto phys = to_physical_real(f);
    out.write(reinterpret_cast<const char*>(phys.data()),
              std::streamsize(phys.size() * sizeof(double)));
}

Field read_field_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::int32_t dim = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (dim != 1 && dim != 2) throw std::runtime_error("bad field file header");
    std::int32_t N = 0;
    for (int d = 0; d < dim; ++d) in.read(reinterpret_cast<char*>(&N), sizeof(N));
    double L = 0.0;
    in.read(reinterpret_cast<char*>(&L), sizeof(L));
    auto grid = make_grid(dim, L, N);
    std::vector<double> phys(grid->total_points());
    in.read(reinterpret_cast<char*>(phys.data()),
            std::streamsize(phys.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated field file");
    return field_from_physical(grid, phys);
}

void write_field_csv_1d(const Field& f, const std::filesystem::path& path) {
    if (f.grid->dim != 1) throw std::invalid_argument("CSV field export is 1-D only");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "x,value\n";
    auto phys = to_physical_real(f);
    for (std::size_t i = 0; i < phys.size(); ++i) {
        out << format_double(f.grid->coord(int(i))) << ',' << format_double(phys[i]) << '\n';
    }
}

nlohmann::json verdict_to_json(const RegionVerdict& v) {
    nlohmann::json j;
    j["verdict"] = to_string(v.verdict);
    j["local_ok"] = v.local_ok;
    j["global_ok"] = v.global_ok;
    j["blowup"] = v.blowup;
    j["local_reason"] = v.local_reason;
    j["global_reason"] = v.global_reason;
    j["blowup_reason"] = v.blowup_reason;
    j["p_crit"] = v.pc.finite ? nlohmann::json(v.pc.value) : nlohmann::json("none");
    j["failed_conditions"] = v.failed_conditions;
    j["boundary_hits"] = v.boundary_hits;
    return j;
}

nlohmann::json classification_report(const ModelParams& q, RegularityIndex m) {
    nlohmann::json j = verdict_to_json(classify(q, m));
    const auto ex = decay_exponents(q, m);
    const auto ga = gamma_m(q, m);
    j["n"] = q.n;
    j["sigma"] = q.sigma;
    j["sigma1"] = q.sigma1;
    j["sigma2"] = q.sigma2;
    j["p"] = q.p;
    j["m"] = m.m;
    j["alpha_u"] = ex.alpha_u;
    j["alpha_grad"] = ex.alpha_grad;
    j["gamma_m"] = ga.gamma;
    if (ga.subcritical) j["lifespan_slope"] = ga.lifespan_slope;
    return j;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series) {
    const double W = 720, H = 480, ml = 70, mr = 20, mt = 40, mb = 55;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (double x : s.x) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
        }
        for (double y : s.y) {
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!(xmax > xmin)) {
        xmin -= 1;
        xmax += 1;
    }
    if (!(ymax > ymin)) {
        ymin -= 1;
        ymax += 1;
    }
    const double xpad = 0.03 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' viewBox='0 0 " << W << " " << H << "'>\n";
    out << "<rect width='" << W << "' height='" << H << "' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    // axes
    out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    const int nticks = 6;
    for (int i = 0; i <= nticks; ++i) {
        const double x = xmin + (xmax - xmin) * i / nticks;
        const double y = ymin + (ymax - ymin) * i / nticks;
        out << "<line x1='" << px(x) << "' y1='" << H - mb << "' x2='" << px(x) << "' y2='"
            << H - mb + 5 << "' stroke='black'/>\n";
        out << "<text x='" << px(x) << "' y='" << H - mb + 18
            << "' text-anchor='middle' font-size='11'>" << tick_label(x) << "</text>\n";
        out << "<line x1='" << ml - 5 << "' y1='" << py(y) << "' x2='" << ml << "' y2='" << py(y)
            << "' stroke='black'/>\n";
        out << "<text x='" << ml - 8 << "' y='" << py(y) + 4
            << "' text-anchor='end' font-size='11'>" << tick_label(y) << "</text>\n";
    }
    out << "<text x='" << (ml + W - mr) / 2 << "' y='" << H - 12
        << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n";
    out << "<text x='18' y='" << (mt + H - mb) / 2
        << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 "
        << (mt + H - mb) / 2 << ")'>" << ylabel << "</text>\n";

    int ci = 0;
    double ly = mt + 8;
    for (const auto& s : series) {
        const char* color = kPalette[ci % 6];
        if (s.points_only) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                out << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i])
                    << "' r='3.5' fill='" << color << "'/>\n";
            }
        } else {
            out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.6' points='";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            }
            out << "'/>\n";
        }
        out << "<text x='" << W - mr - 6 << "' y='" << ly << "' text-anchor='end' font-size='12' fill='"
            << color << "'>" << s.label << "</text>\n";
        ly += 16;
        ++ci;
    }
    out << "</svg>\n";
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_key(const std::string& canonical) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical)));
    return buf;
}

SweepStore::SweepStore(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("key")) continue;  // truncated tail
        records_[rec["key"].get<std::string>()] = rec;
    }
}

bool SweepStore::contains(const std::string& key) const { return records_.count(key) > 0; }

const nlohmann::json* SweepStore::find(const std::string& key) const {
    auto it = records_.find(key);
    return it == records_.end() ? nullptr : &it->second;
}

void SweepStore::append(const std::string& key, const nlohmann::json& record) {
    if (contains(key)) return;  // completed keys are immutable
    nlohmann::json rec = record;
    rec["key"] = key;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot open " + path_.string());
    out << rec.dump() << '\n';
    out.flush();
    records_[key] = rec;
}

}  // namespace sevo
