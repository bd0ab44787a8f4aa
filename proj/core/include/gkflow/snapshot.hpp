#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

#include "gkflow/complex_structure.hpp"
#include "gkflow/gauge_transport.hpp"

namespace gkflow {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reuses one backend for every header describing the same discretization,
/// so fields loaded together share a BackendPtr.
class BackendCache {
 public:
  BackendPtr get(const std::string& header_text);

 private:
  std::map<std::string, BackendPtr> cache_;
};

/// Backend header lines ("backend …" through the last geometry line).
void write_backend_header(std::ostream& os, const Backend& b);
BackendPtr read_backend_header(std::istream& is, BackendCache* cache = nullptr);

/// Field snapshot: "gkflow-field 1", name, backend header, slots, symmetry,
/// points, components, then one line of components per point and "end".
void write_field(std::ostream& os, const TensorField& t, const std::string& name);
TensorField read_field(std::istream& is, std::string* name = nullptr, BackendCache* cache = nullptr);
void save_field(const std::filesystem::path& file, const TensorField& t, const std::string& name);
TensorField load_field(const std::filesystem::path& file, std::string* name = nullptr, BackendCache* cache = nullptr);

/// GKState snapshot directory: g.gkf, h.gkf, j_plus.gkf, j_minus.gkf and
/// manifest.txt (time, residuals at save time and `extra` entries as
/// key = value lines).
void save_state(const std::filesystem::path& dir, const GKState& s, double t,
                const std::map<std::string, std::string>& extra = {});
GKState load_state(const std::filesystem::path& dir, double* t = nullptr);
std::map<std::string, std::string> read_manifest(const std::filesystem::path& dir);

/// DiffeoFlow snapshot: header (backend, times, active axes, step error)
/// followed by one block per time with φ and dφ for every point.
void write_diffeo(std::ostream& os, const DiffeoFlow& phi);
DiffeoFlow read_diffeo(std::istream& is, BackendCache* cache = nullptr);

}  // namespace gkflow
