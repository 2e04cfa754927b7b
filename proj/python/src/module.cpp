// Copyright 2026 The occgrid Authors
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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <string>
#include <vector>

#include "occgrid/autolabel.hpp"
#include "occgrid/io.hpp"
#include "occgrid/lovasz.hpp"
#include "occgrid/metrics.hpp"
#include "occgrid/occnet.hpp"
#include "occgrid/pipeline.hpp"
#include "occgrid/raytrace.hpp"
#include "occgrid/simworld.hpp"

namespace py = pybind11;

namespace occgrid
{
namespace
{

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

void check_shape(const py::buffer_info & info, const GridSpec & spec, const char * what)
{
  if (info.ndim != 2 || info.shape[0] != spec.height || info.shape[1] != spec.width) {
    throw Error(ErrorCategory::kShape, std::string(what) + ": array shape does not match the grid spec");
  }
}

template <typename T>
Grid<T> grid_from(const GridSpec & spec, const py::array_t<T, py::array::c_style | py::array::forcecast> & a, const char * what)
{
  const py::buffer_info info = a.request();
  check_shape(info, spec, what);
  const auto * p = static_cast<const T *>(info.ptr);
  return Grid<T>(spec, std::vector<T>(p, p + spec.cell_count()));
}

U8Array mask_array(const MaskGrid & g)
{
  U8Array out({g.height(), g.width()});
  std::memcpy(out.mutable_data(), g.data().data(), g.size());
  return out;
}

U8Array label_array(const LabelGrid & g)
{
  U8Array out({g.height(), g.width()});
  auto * p = out.mutable_data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    p[i] = static_cast<std::uint8_t>(g[i]);
  }
  return out;
}

LabelGrid labels_from(const GridSpec & spec, const U8Array & a)
{
  const MaskGrid raw = grid_from<std::uint8_t>(spec, a, "labels");
  LabelGrid g(spec);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (raw[i] > 3) {
      throw Error(ErrorCategory::kFormat, "labels: values must lie in 0..3");
    }
    g[i] = static_cast<Label>(raw[i]);
  }
  return g;
}

ProbMap probs_from(const GridSpec & spec, const F64Array & a)
{
  const py::buffer_info info = a.request();
  if (info.ndim != 3 || info.shape[0] != spec.height || info.shape[1] != spec.width || info.shape[2] != kNumClasses) {
    throw Error(ErrorCategory::kShape, "probs: expected an H x W x 3 array");
  }
  ProbMap p(spec);
  std::memcpy(p.data.data(), info.ptr, p.data.size() * sizeof(double));
  return p;
}

F64Array probs_array(const GridSpec & spec, const std::vector<double> & data)
{
  F64Array out({spec.height, spec.width, kNumClasses});
  std::memcpy(out.mutable_data(), data.data(), data.size() * sizeof(double));
  return out;
}

py::dict loss_dict(const GridSpec & spec, const LossResult & r)
{
  py::dict d;
  d["loss"] = r.loss;
  d["grad"] = probs_array(spec, r.grad);
  d["per_class"] = r.per_class;
  d["present"] = r.present;
  return d;
}

py::dict report_dict(const MetricsReport & r)
{
  py::dict d;
  d["iou_free"] = r.iou_free;
  d["iou_occupied"] = r.iou_occupied;
  d["iou_unobserved"] = r.iou_unobserved;
  d["miou"] = r.miou;
  d["n_grids"] = r.n_grids;
  return d;
}

}  // namespace
}  // namespace occgrid

PYBIND11_MODULE(_core, m)
{
  using namespace occgrid;
  m.doc() = "Radar occupancy grids: ray casting, labels, metrics, losses and the occupancy network.";

  // released so the type outlives module teardown
  static const py::handle error_type = py::exception<Error>(m, "OccgridError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) {
        std::rethrow_exception(p);
      }
    } catch (const Error & e) {
      py::object exc = error_type(py::str(e.what()));
      exc.attr("category") = category_name(e.category());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::enum_<Label>(m, "Label")
    .value("FREE", Label::kFree)
    .value("OCCUPIED", Label::kOccupied)
    .value("UNOBSERVED", Label::kUnobserved)
    .value("IGNORE", Label::kIgnore);

  py::class_<GridSpec>(m, "GridSpec")
    .def(py::init<>())
    .def_static("forward", &GridSpec::forward, py::arg("height"), py::arg("width"), py::arg("cell"))
    .def_static("standard", &GridSpec::standard)
    .def_readwrite("height", &GridSpec::height)
    .def_readwrite("width", &GridSpec::width)
    .def_readwrite("cell_x", &GridSpec::cell_x)
    .def_readwrite("cell_y", &GridSpec::cell_y)
    .def_property(
      "origin", [](const GridSpec & s) { return py::make_tuple(s.origin.x, s.origin.y); },
      [](GridSpec & s, std::pair<double, double> o) { s.origin = {o.first, o.second}; })
    .def("__eq__", [](const GridSpec & a, const GridSpec & b) { return a == b; })
    .def("__repr__", [](const GridSpec & s) {
      return "GridSpec(" + std::to_string(s.height) + "x" + std::to_string(s.width) + ")";
    });

  m.def("world_to_cell", [](std::pair<double, double> p, const GridSpec & spec) -> py::object {
    if (const auto c = world_to_cell({p.first, p.second}, spec)) {
      return py::make_tuple(c->u, c->v);
    }
    return py::none();
  });
  m.def("traverse_ray", [](const GridSpec & spec, std::pair<double, double> a, std::pair<double, double> b) {
    std::vector<std::pair<int, int>> out;
    for (const Cell & c : traverse_ray(spec, {a.first, a.second}, {b.first, b.second})) {
      out.emplace_back(c.u, c.v);
    }
    return out;
  });
  m.def(
    "visibility_label",
    [](const GridSpec & spec, const U8Array & mask, double fov_half_angle, double max_range,
       std::pair<double, double> sensor) {
      return label_array(visibility_label(
        spec, {sensor.first, sensor.second}, grid_from<std::uint8_t>(spec, mask, "mask"), fov_half_angle,
        max_range));
    },
    py::arg("spec"), py::arg("mask"), py::arg("fov_half_angle"), py::arg("max_range"),
    py::arg("sensor") = std::pair<double, double>{0.0, 0.0});

  m.def("miou", [](std::vector<double> ious) { return miou(ious); });
  m.def("iou_per_class", [](const GridSpec & spec, const U8Array & pred, const U8Array & gt) {
    return iou_per_class(confusion(labels_from(spec, pred), labels_from(spec, gt)));
  });
  m.def("evaluate", [](const GridSpec & spec, const std::vector<U8Array> & preds, const std::vector<U8Array> & gts) {
    std::vector<LabelGrid> p;
    std::vector<LabelGrid> g;
    for (const auto & a : preds) {
      p.push_back(labels_from(spec, a));
    }
    for (const auto & a : gts) {
      g.push_back(labels_from(spec, a));
    }
    return report_dict(evaluate(p, g));
  });

  m.def("lovasz_softmax", [](const GridSpec & spec, const F64Array & probs, const U8Array & gt) {
    return loss_dict(spec, lovasz_softmax(probs_from(spec, probs), labels_from(spec, gt)));
  });
  m.def(
    "weighted_cross_entropy",
    [](const GridSpec & spec, const F64Array & probs, const U8Array & gt, std::array<double, kNumClasses> w) {
      return loss_dict(spec, weighted_cross_entropy(probs_from(spec, probs), labels_from(spec, gt), w));
    },
    py::arg("spec"), py::arg("probs"), py::arg("gt"), py::arg("weights") = std::array<double, kNumClasses>{1.0, 1.0, 1.0});

  py::class_<SceneBundle>(m, "SceneBundle")
    .def_readonly("seed", &SceneBundle::seed)
    .def_readonly("grid", &SceneBundle::grid)
    .def_property_readonly("steps", [](const SceneBundle & s) { return s.steps.size(); })
    .def_property_readonly("radar_ids", [](const SceneBundle & s) {
      std::vector<std::string> ids;
      for (const SensorMount & m : s.radar_mounts()) {
        ids.push_back(m.sensor_id);
      }
      return ids;
    })
    .def("encode", [](const SceneBundle & s) {
      const auto b = encode_scene(s);
      return py::bytes(reinterpret_cast<const char *>(b.data()), b.size());
    })
    .def("__eq__", [](const SceneBundle & a, const SceneBundle & b) { return a == b; });

  m.def(
    "gen_scene",
    [](std::uint64_t seed, std::size_t steps, const GridSpec & grid) {
      SceneParams p;
      p.steps = steps;
      p.grid = grid;
      return gen_scene(seed, p);
    },
    py::arg("seed"), py::arg("steps") = 120, py::arg("grid") = GridSpec::standard());
  m.def("decode_scene", [](const py::bytes & b) {
    const std::string s = b;
    return decode_scene({reinterpret_cast<const std::uint8_t *>(s.data()), s.size()});
  });
  m.def("read_scene", &read_scene);
  m.def("write_scene", &write_scene);

  m.def(
    "label_frame",
    [](const SceneBundle & scene, const std::string & sensor_id, std::size_t step, bool masked) {
      LabelConfig cfg;
      cfg.max_range = scene.grid.extent_x();
      const SceneLabeler labeler(scene, cfg);
      return label_array(
        masked ? labeler.label(sensor_id, step, scene.grid) : labeler.label_unmasked(sensor_id, step, scene.grid));
    },
    py::arg("scene"), py::arg("sensor_id"), py::arg("step"), py::arg("masked") = true);
  m.def(
    "window_input",
    [](const SceneBundle & scene, const std::string & sensor_id, std::size_t last, std::size_t k) {
      return mask_array(window_input(scene, sensor_id, window_ending_at(last, k), scene.grid, 0.5));
    },
    py::arg("scene"), py::arg("sensor_id"), py::arg("last"), py::arg("k"));
  m.def(
    "raytrace_predict",
    [](const GridSpec & spec, const U8Array & input, double fov_half_angle, double max_range) {
      return label_array(raytrace_predict(grid_from<std::uint8_t>(spec, input, "input"), fov_half_angle, max_range));
    });

  py::class_<OccNetModel>(m, "OccNetModel")
    .def_readonly("widths", &OccNetModel::widths)
    .def_property_readonly("parameter_count", [](const OccNetModel & m) { return m.params.size(); })
    .def("__eq__", [](const OccNetModel & a, const OccNetModel & b) { return a == b; });
  m.def("make_model", &make_model, py::arg("widths"), py::arg("seed"));
  m.def("read_model", &read_model);
  m.def("write_model", &write_model);
  m.def("forward", [](const OccNetModel & model, const GridSpec & spec, const U8Array & input) {
    return probs_array(spec, forward(model, grid_from<std::uint8_t>(spec, input, "input")).data);
  });
  m.def("infer", [](const OccNetModel & model, const GridSpec & spec, const U8Array & input) {
    return label_array(infer(model, grid_from<std::uint8_t>(spec, input, "input")));
  });
  m.def(
    "train",
    [](const GridSpec & spec, const std::vector<std::pair<U8Array, U8Array>> & train_set,
       const std::vector<std::pair<U8Array, U8Array>> & val_set, std::vector<int> widths, int epochs,
       std::uint64_t seed) {
      auto convert = [&](const std::vector<std::pair<U8Array, U8Array>> & in) {
        std::vector<Sample> out;
        for (const auto & [x, y] : in) {
          out.push_back({grid_from<std::uint8_t>(spec, x, "input"), labels_from(spec, y)});
        }
        return out;
      };
      TrainConfig cfg;
      cfg.widths = std::move(widths);
      cfg.epochs = epochs;
      cfg.seed = seed;
      const auto tr = convert(train_set);
      const auto va = convert(val_set);
      TrainResult r;
      {
        py::gil_scoped_release release;
        r = train(tr, va, cfg);
      }
      std::vector<py::dict> log;
      for (const EpochLog & e : r.log) {
        py::dict d;
        d["epoch"] = e.epoch;
        d["lr"] = e.lr;
        d["train_loss"] = e.train_loss;
        d["val_miou"] = e.val_miou;
        log.push_back(d);
      }
      return py::make_tuple(r.model, log);
    },
    py::arg("spec"), py::arg("train_set"), py::arg("val_set"), py::arg("widths") = std::vector<int>{8, 16, 32},
    py::arg("epochs") = 10, py::arg("seed") = 7);

  m.def("read_grid", [](const std::filesystem::path & p) {
    const LabelGrid g = read_grid(p);
    return py::make_tuple(g.spec(), label_array(g));
  });
  m.def("write_grid", [](const std::filesystem::path & p, const GridSpec & spec, const U8Array & labels) {
    write_grid(p, labels_from(spec, labels));
  });
}
