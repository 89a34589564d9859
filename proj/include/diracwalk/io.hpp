// Copyright 2026 The diracwalk Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "diracwalk/lattice.hpp"
#include "diracwalk/montecarlo.hpp"
#include "diracwalk/spectral.hpp"
#include "diracwalk/wavefunction.hpp"

namespace diracwalk::io {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Minimal CSV builder: fixed header, comma separated, '\n' line endings.
// Cells are numeric or plain identifiers, so no quoting is needed.
class Csv {
public:
    explicit Csv(std::initializer_list<std::string_view> header) : columns_(header.size()) {
        bool first = true;
        for (auto h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    Csv& cell(double v) { return put(format_double(v)); }
    Csv& cell(std::int64_t v) { return put(std::to_string(v)); }
    Csv& cell(int v) { return put(std::to_string(v)); }
    Csv& cell(bool v) { return put(v ? "1" : "0"); }
    Csv& cell_text(std::string_view v) {
        if (v.find_first_of(",\"\n\r") != std::string_view::npos) {
            throw std::invalid_argument("Csv: text cell needs quoting: " + std::string(v));
        }
        return put(std::string(v));
    }

    void end_row() {
        if (in_row_ != columns_) {
            throw std::logic_error("Csv: row has " + std::to_string(in_row_) + " cells, header has " +
                                   std::to_string(columns_));
        }
        out_ << '\n';
        in_row_ = 0;
        ++rows_;
    }

    std::size_t rows() const { return rows_; }
    std::string str() const { return out_.str(); }

private:
    Csv& put(const std::string& s) {
        if (in_row_ > 0) out_ << ',';
        out_ << s;
        ++in_row_;
        return *this;
    }

    std::size_t columns_;
    std::size_t in_row_ = 0;
    std::size_t rows_ = 0;
    std::ostringstream out_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) throw IoError("write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

// t_index,x_index,p1,p2,p3,p4 for every site.
inline std::string prob_field_csv(const ProbField& f) {
    Csv csv{"t_index", "x_index", "p1", "p2", "p3", "p4"};
    for (int t = 0; t < f.nt(); ++t) {
        for (int x = 0; x < f.nx(); ++x) {
            csv.cell(t).cell(x);
            for (int s = 0; s < 4; ++s) csv.cell(f.p(s, t, x));
            csv.end_row();
        }
    }
    return csv.str();
}

inline std::string wave_field_csv(const WaveField& w) {
    Csv csv{"t_index", "x_index", "psi1", "psi2", "psi3", "psi4"};
    for (int t = 0; t < w.nt(); ++t) {
        for (int x = 0; x < w.nx(); ++x) {
            csv.cell(t).cell(x);
            for (int s = 0; s < 4; ++s) csv.cell(w.psi(s, t, x));
            csv.end_row();
        }
    }
    return csv.str();
}

inline std::string current_csv(const CurrentField& c) {
    Csv csv{"t_index", "x_index", "rho", "j"};
    for (int t = 0; t < c.nt; ++t) {
        for (int x = 0; x < c.nx; ++x) {
            csv.cell(t).cell(x).cell(c.rho_at(t, x)).cell(c.j_at(t, x));
            csv.end_row();
        }
    }
    return csv.str();
}

// Points without a real root print omega_lattice and rel_error as nan.
inline std::string dispersion_csv(const std::vector<DispersionPoint>& points) {
    Csv csv{"k", "omega_lattice", "omega_einstein", "rel_error", "in_regime"};
    for (const auto& p : points) {
        csv.cell(p.k).cell(p.omega_lattice).cell(p.omega_einstein).cell(p.rel_error).cell(p.in_regime);
        csv.end_row();
    }
    return csv.str();
}

// Coordinates are the unbounded walker coordinates.
inline std::string trajectory_csv(const Trajectory& traj) {
    Csv csv{"lambda", "t_index", "x_index", "state"};
    for (const auto& w : traj) {
        csv.cell(w.lambda).cell(w.t).cell(w.x).cell(w.state);
        csv.end_row();
    }
    return csv.str();
}

inline std::string observation_csv(const ObservationRecord& rec) {
    Csv csv{"t_index", "x_observed", "lambda_last"};
    for (const auto& [t, o] : rec.slices) {
        csv.cell(t).cell(o.x).cell(o.lambda);
        csv.end_row();
    }
    return csv.str();
}

// Empirical occupation per recorded lambda; only occupied sites are listed.
inline std::string histogram_csv(const EnsembleSummary& sum) {
    Csv csv{"lambda", "t_index", "x_index", "p1", "p2", "p3", "p4"};
    for (const auto& h : sum.histograms) {
        for (int t = 0; t < h.nt(); ++t) {
            for (int x = 0; x < h.nx(); ++x) {
                bool any = false;
                for (int s = 0; s < 4; ++s) any = any || h.p(s, t, x) != 0.0;
                if (!any) continue;
                csv.cell(h.lambda).cell(t).cell(x);
                for (int s = 0; s < 4; ++s) csv.cell(h.p(s, t, x));
                csv.end_row();
            }
        }
    }
    return csv.str();
}

}  // namespace diracwalk::io
