#include "snapshot.hpp"

#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace sdg {

void write_snapshot(const std::string& path, const Mesh& mesh, const GlobalField& field,
                    double time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open snapshot file " + path);
  os.precision(17);
  os << "SDGFLD1\n";
  os << "n_elements " << field.n_elements << " degree " << field.n1 - 1 << " nvars "
     << kNumVars << " time " << time << "\n";
  os << "domain " << mesh.spec().x0 << ' ' << mesh.spec().y0 << ' ' << mesh.spec().width
     << ' ' << mesh.spec().height << " ny " << mesh.spec().ny << "\n";
  for (const auto& b : mesh.bands())
    os << "band " << b.id << " x_lo " << b.x_lo << " nx " << b.nx << " vg " << b.vg_y
       << "\n";
  os << "end_header\n";
  os.write(reinterpret_cast<const char*>(field.data.data()),
           static_cast<std::streamsize>(field.data.size() * sizeof(double)));
  if (!os) throw ConfigError("snapshot write failed for " + path);
}

GlobalField read_snapshot(const std::string& path, const Mesh& mesh, double& time) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open snapshot file " + path);
  std::string line;
  std::getline(is, line);
  if (line != "SDGFLD1") throw ConfigError("not a snapshot file: " + path);

  GlobalField field;
  std::getline(is, line);
  {
    std::istringstream hs(line);
    std::string tag;
    int nvars = 0, degree = 0;
    hs >> tag >> field.n_elements >> tag >> degree >> tag >> nvars >> tag >> time;
    field.n1 = degree + 1;
    if (nvars != kNumVars) throw ConfigError("snapshot variable count mismatch");
  }
  if (field.n_elements != mesh.n_elements())
    throw ConfigError("snapshot element count does not match the mesh");
  while (std::getline(is, line) && line != "end_header") {
  }
  field.data.assign(
      static_cast<std::size_t>(field.n_elements) * field.n1 * field.n1 * kNumVars, 0.0);
  is.read(reinterpret_cast<char*>(field.data.data()),
          static_cast<std::streamsize>(field.data.size() * sizeof(double)));
  if (!is) throw ConfigError("snapshot payload truncated in " + path);
  return field;
}

}  // namespace sdg
