#include "madelab/csv.hpp"

#include <cstdio>
#include <fstream>

#include "madelab/bohm.hpp"
#include "madelab/errors.hpp"

namespace madelab::csv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

} // namespace

void write_field(const std::filesystem::path& path, const MadelungFields& fields,
                 const std::vector<double>& quantum_potential) {
    if (quantum_potential.size() != fields.rho.size())
        throw ValidationError("write_field: Q size mismatch");
    auto out = open_out(path);
    const Grid& g = fields.grid;
    out << "# time=" << format_double(fields.time) << " dim=" << g.dim << " units=natural\n";
    for (int a = 0; a < g.dim; ++a) out << "x" << (a + 1) << ",";
    out << "rho,S,Q\n";
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec x = g.node(i);
        for (int a = 0; a < g.dim; ++a) out << format_double(x[a]) << ",";
        out << format_double(fields.rho[i]) << "," << format_double(fields.action[i]) << ","
            << format_double(quantum_potential[i]) << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_trajectories(const std::filesystem::path& path, const bohm::EnsembleRun& run,
                        int dim) {
    auto out = open_out(path);
    const std::size_t n = run.trajectories.size();
    out << "time";
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < dim; ++a) out << ",p" << i << "_x" << (a + 1);
    out << "\n";
    if (n == 0) return;
    const auto& times = run.trajectories.front().times;
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << format_double(times[k]);
        for (std::size_t i = 0; i < n; ++i)
            for (int a = 0; a < dim; ++a)
                out << "," << format_double(run.trajectories[i].positions[k][a]);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace madelab::csv
