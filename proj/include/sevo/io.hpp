#ifndef SEVO_IO_HPP
#define SEVO_IO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sevo/diagnostics.hpp"
#include "sevo/propagator.hpp"

namespace sevo {

/// Round-trip-safe decimal rendering (17 significant digits).
std::string format_double(double x);

/// Trace CSV schema: t,L2,Hsigma_dot,Linf,Lq_m1,zero_mode,h_used,blowup_flag.
std::string trace_to_csv(const SimulationTrace& trace);
void write_trace_csv(const SimulationTrace& trace, const std::filesystem::path& path);

/// Field binary layout: int32 dim, int32 N (per dimension, dim entries),
/// float64 L, then row-major float64 physical values. Little-endian.
void write_field_binary(const Field& f, const std::filesystem::path& path);
Field read_field_binary(const std::filesystem::path& path);
void write_field_csv_1d(const Field& f, const std::filesystem::path& path);

nlohmann::json verdict_to_json(const RegionVerdict& v);
/// Combined classification report with stable field names:
/// p_crit, alpha_u, alpha_grad, gamma_m, verdict, failed_conditions.
nlohmann::json classification_report(const ModelParams& params, RegularityIndex m);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool points_only = false;
};

/// Minimal standalone SVG line plot; data arrive already in plot coordinates
/// (pass logs for log-log axes).
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series);

std::uint64_t fnv1a64(const std::string& s);
std::string hash_key(const std::string& canonical);

/// Append-only JSON-lines record log with resume semantics: a completed key
/// is never recomputed, and a truncated trailing line (crash artifact) is
/// ignored on load.
class SweepStore {
  public:
    explicit SweepStore(std::filesystem::path path);
    bool contains(const std::string& key) const;
    const nlohmann::json* find(const std::string& key) const;
    void append(const std::string& key, const nlohmann::json& record);
    std::size_t size() const { return records_.size(); }

  private:
    std::filesystem::path path_;
    std::map<std::string, nlohmann::json> records_;
};

}  // namespace sevo

#endif
