// Copyright 2026 The dmsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dms/camera.hpp"
#include "dms/campaigns.hpp"
#include "dms/cli.hpp"
#include "dms/pointer.hpp"
#include "dms/quantum.hpp"
#include "dms/reconstruction.hpp"

namespace py = pybind11;
using namespace dms;

namespace {

DensityMatrix density_from_array(const MatrixXc& entries, bool reconstructed) {
  return reconstructed ? reconstructed_density(entries) : density_matrix(entries);
}

std::optional<NoiseModel> make_noise(double relative_sigma, int trials, std::uint64_t seed,
                                     double background) {
  if (relative_sigma <= 0.0) return std::nullopt;
  NoiseModel noise;
  noise.relative_sigma = relative_sigma;
  noise.trials = trials;
  noise.seed = seed;
  noise.background_level = background;
  return noise;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "direct density-matrix measurement simulator (C++ core)";

  py::class_<PureState>(m, "PureState")
      .def(py::init<Complex, Complex>(), py::arg("a"), py::arg("b"))
      .def_readonly("a", &PureState::a)
      .def_readonly("b", &PureState::b)
      .def("norm_squared", &PureState::norm_squared);

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init(&density_from_array), py::arg("entries"), py::arg("reconstructed") = false)
      .def_property_readonly("entries",
                             [](const DensityMatrix& rho) { return rho.entries; })
      .def_readonly("reconstructed", &DensityMatrix::reconstructed)
      .def("dim", &DensityMatrix::dim)
      .def("__repr__", [](const DensityMatrix& rho) {
        std::ostringstream os;
        os << "DensityMatrix(dim=" << rho.dim() << ", reconstructed="
           << (rho.reconstructed ? "True" : "False") << ")";
        return os.str();
      });

  py::class_<Projector>(m, "Projector")
      .def(py::init([](const VectorXc& ket) { return projector(ket); }), py::arg("ket"))
      .def_property_readonly("ket", [](const Projector& p) { return p.ket; })
      .def("matrix", &Projector::matrix);

  py::class_<PointerConfig>(m, "PointerConfig")
      .def(py::init([](double sigma, double delta) { return make_pointer_config(sigma, delta); }),
           py::arg("sigma") = 250.0, py::arg("delta") = 176.0)
      .def_readonly("sigma_x", &PointerConfig::sigma_x)
      .def_readonly("sigma_y", &PointerConfig::sigma_y)
      .def_readonly("delta_x", &PointerConfig::delta_x)
      .def_readonly("delta_y", &PointerConfig::delta_y)
      .def("sigma_px", &PointerConfig::sigma_px)
      .def("sigma_py", &PointerConfig::sigma_py)
      .def("strength", &PointerConfig::strength);

  py::class_<ExpectationSet>(m, "ExpectationSet")
      .def(py::init<>())
      .def_readwrite("m_xy", &ExpectationSet::m_xy)
      .def_readwrite("m_pxpy", &ExpectationSet::m_pxpy)
      .def_readwrite("m_pxy", &ExpectationSet::m_pxy)
      .def_readwrite("m_xpy", &ExpectationSet::m_xpy);

  py::class_<TomographyData>(m, "TomographyData")
      .def(py::init<double, double, double, double, double, double>(), py::arg("p_h"),
           py::arg("p_v"), py::arg("p_d"), py::arg("p_a"), py::arg("p_r"), py::arg("p_l"))
      .def_readwrite("p_h", &TomographyData::p_h)
      .def_readwrite("p_v", &TomographyData::p_v)
      .def_readwrite("p_d", &TomographyData::p_d)
      .def_readwrite("p_a", &TomographyData::p_a)
      .def_readwrite("p_r", &TomographyData::p_r)
      .def_readwrite("p_l", &TomographyData::p_l);

  m.def("polarization_ket", &polarization_ket, py::arg("label"));
  m.def("basis_projector", &basis_projector, py::arg("label"));
  m.def("density_from_pure", &density_from_pure, py::arg("state"));
  m.def("purity", &purity, py::arg("rho"));
  m.def("trace_distance", &trace_distance, py::arg("rho"), py::arg("beta"));
  m.def(
      "waveplate_unitary",
      [](const std::string& kind, double fast_axis_rad) {
        if (kind != "half" && kind != "quarter")
          throw std::invalid_argument("waveplate kind must be 'half' or 'quarter'");
        return waveplate_unitary(
            {kind == "half" ? WaveplateKind::half : WaveplateKind::quarter, fast_axis_rad});
      },
      py::arg("kind"), py::arg("fast_axis_rad"));
  m.def("pure_path_state", &pure_path_state, py::arg("theta"), py::arg("alpha"));
  m.def("spun_mixed_analytic", &spun_mixed_analytic, py::arg("phi"));
  m.def("spun_mixed_numeric", &spun_mixed_numeric, py::arg("phi"), py::arg("samples") = 360);
  m.def("project_to_physical", &project_to_physical, py::arg("rho"));

  m.def("expectation_set", &expectation_set, py::arg("rho"), py::arg("first"),
        py::arg("final"), py::arg("config"));
  m.def(
      "operator_weak_average",
      [](const DensityMatrix& rho, const Projector& first, const Projector& middle,
         const Projector& final_proj) {
        return operator_weak_average(rho, make_sequence(first, middle, final_proj));
      },
      py::arg("rho"), py::arg("first"), py::arg("middle"), py::arg("final"));
  m.def("direct_element", &direct_element, py::arg("set"), py::arg("config"));
  m.def(
      "direct_matrix",
      [](const DensityMatrix& rho, const PointerConfig& config, double noise_sigma, int trials,
         std::uint64_t seed) {
        return direct_matrix(rho, config, make_noise(noise_sigma, trials, seed, 0.0));
      },
      py::arg("rho"), py::arg("config"), py::arg("noise_sigma") = 0.0, py::arg("trials") = 10,
      py::arg("seed") = 0);
  m.def("qst_probabilities", &qst_probabilities, py::arg("rho"));
  m.def("qst_reconstruct", &qst_reconstruct, py::arg("data"), py::arg("pair_tolerance") = 1e-10);
  m.def("bias_curve", &bias_curve, py::arg("rho"), py::arg("strengths"));

  m.def(
      "direct_matrix_camera",
      [](const DensityMatrix& rho, const PointerConfig& config, int width_px, int height_px,
         double pitch_um, double fourier_width_um, double noise_sigma, int trials,
         std::uint64_t seed, double filter_cutoff) {
        CameraFrame frame = CameraFrame::centered(width_px, height_px, pitch_um);
        frame.fourier_width_um = fourier_width_um;
        return direct_matrix_camera(rho, config, frame,
                                    make_noise(noise_sigma, trials, seed, 0.0), filter_cutoff,
                                    seed);
      },
      py::arg("rho"), py::arg("config"), py::arg("width_px") = 1024, py::arg("height_px") = 1024,
      py::arg("pitch_um") = 2.2, py::arg("fourier_width_um") = 90.0,
      py::arg("noise_sigma") = 0.0, py::arg("trials") = 10, py::arg("seed") = 0,
      py::arg("filter_cutoff") = 0.5,
      "Reconstruct all four elements through the emulated camera acquisition chain.");

  m.def(
      "sweep_csv",
      [](int path, int steps, double strength, double noise_sigma, int trials,
         std::uint64_t seed, bool camera, const std::string& out_path) {
        std::vector<std::string> args = {"sweep", "--path",
                                         std::to_string(path), "--steps", std::to_string(steps),
                                         "--strength", std::to_string(strength), "--seed",
                                         std::to_string(seed), "--out", out_path};
        if (noise_sigma > 0.0) {
          args.push_back("--noise");
          args.push_back(std::to_string(noise_sigma));
          args.push_back("--trials");
          args.push_back(std::to_string(trials));
        }
        if (camera) args.push_back("--camera");
        std::ostringstream out, err;
        const int status = dms::cli::run(args, out, err);
        if (status != 0) throw std::runtime_error("sweep failed: " + err.str());
      },
      py::arg("path"), py::arg("steps"), py::arg("strength"), py::arg("noise_sigma") = 0.0,
      py::arg("trials") = 10, py::arg("seed") = 0, py::arg("camera") = false,
      py::arg("out_path") = std::string("sweep.csv"),
      "Run a Poincare-path sweep and write the CSV to out_path.");
}
