#ifndef ISCAT_IO_HPP
#define ISCAT_IO_HPP

#include <string>
#include <vector>

#include "iscat/gelfand_levitan.hpp"
#include "iscat/ifunction.hpp"
#include "iscat/marchenko.hpp"
#include "iscat/mixed_data.hpp"
#include "iscat/scatter.hpp"

namespace iscat {
namespace io {

// JSON file formats shared by the pipelines; all writers are deterministic.
void save_scattering(const ScatteringData& sd, const std::string& path);
ScatteringData load_scattering(const std::string& path);

void save_spectral(const SpectralMeasure& rho, const std::string& path);
SpectralMeasure load_spectral(const std::string& path);

void save_ifunction(const IFunctionData& data, const std::string& path);
IFunctionData load_ifunction(const std::string& path);

void save_spectra(const mixed::TwoSpectra& ts, const std::string& path);
mixed::TwoSpectra load_spectra(const std::string& path);

// CSV writers
void save_columns(const std::string& path, const std::vector<std::string>& names,
                  const std::vector<const std::vector<double>*>& cols);
void save_marchenko_F(const MarchenkoKernel& F, const std::string& path);
mixed::CauchyData load_cauchy_csv(const std::string& path);
void save_cauchy_csv(const mixed::CauchyData& cd, const std::string& path);

}  // namespace io
}  // namespace iscat

#endif
