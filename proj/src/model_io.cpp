/*
 * Copyright 2026 The gfcs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Model file layout (all integers and floats little-endian):
//
//   offset 0   8 bytes   magic "GFCSMODL"
//   offset 8   u64       header length N
//   offset 16  N bytes   UTF-8 JSON header
//   then       f64[...]  parameter blocks in layer order; for each layer with
//                        parameters, its weight block then its bias block
//
// The header carries "format", "version", "input" [h, w, c], "classes",
// "seed", "layers" (one object per layer) and "blocks" (layer index, name
// and element count of every parameter block, in file order). Loading
// rejects anything after the last block.

#include "json.hpp"

#include "gfcs/model.hpp"
#include "io_util.hpp"

namespace gfcs {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'G', 'F', 'C', 'S', 'M', 'O', 'D', 'L'};

const char* kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::Affine: return "affine";
    case LayerKind::Conv: return "conv";
    case LayerKind::Relu: return "relu";
    case LayerKind::AvgPool: return "pool";
    case LayerKind::Flatten: return "flatten";
  }
  return "?";
}

LayerKind kind_from(const std::string& s, std::size_t offset) {
  if (s == "affine") return LayerKind::Affine;
  if (s == "conv") return LayerKind::Conv;
  if (s == "relu") return LayerKind::Relu;
  if (s == "pool") return LayerKind::AvgPool;
  if (s == "flatten") return LayerKind::Flatten;
  throw ParseError(offset, "model header: unknown layer type '" + s + "'");
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const Network& model) {
  const Architecture& arch = model.architecture();
  json header;
  header["format"] = "gfcs-model";
  header["version"] = kModelFormatVersion;
  header["input"] = {arch.input.height, arch.input.width, arch.input.channels};
  header["classes"] = model.num_classes();
  header["seed"] = model.seed();
  header["layers"] = json::array();
  for (const LayerSpec& l : arch.layers)
    header["layers"].push_back({{"type", kind_name(l.kind)},
                                {"out", l.out},
                                {"kernel", l.kernel},
                                {"stride", l.stride},
                                {"padding", l.padding}});
  header["blocks"] = json::array();
  const auto& params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].weight.empty() && params[i].bias.empty()) continue;
    header["blocks"].push_back({{"layer", i}, {"name", "weight"}, {"count", params[i].weight.size()}});
    header["blocks"].push_back({{"layer", i}, {"name", "bias"}, {"count", params[i].bias.size()}});
  }
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  io::put_le<std::uint64_t>(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& p : params) {
    for (double w : p.weight) io::put_le(out, w);
    for (double b : p.bias) io::put_le(out, b);
  }
  return out;
}

std::shared_ptr<Network> deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw ParseError(bytes.size(), "model file truncated before header length");
  if (!std::equal(kMagic, kMagic + 8, bytes.begin()))
    throw ParseError(0, "not a model file (bad magic)");
  const auto header_len = io::get_le<std::uint64_t>(bytes.data() + 8);
  if (header_len > bytes.size() - 16)
    throw ParseError(8, "model header length exceeds file size");

  const std::size_t header_at = 16;
  json header;
  try {
    header = json::parse(bytes.begin() + header_at, bytes.begin() + header_at + header_len);
  } catch (const json::parse_error& e) {
    throw ParseError(header_at + (e.byte > 0 ? e.byte - 1 : 0), "model header is not valid JSON");
  }

  std::shared_ptr<Network> model;
  std::size_t cursor = header_at + header_len;
  try {
    if (header.value("format", std::string()) != "gfcs-model")
      throw ParseError(header_at, "model header: wrong format tag");
    const int version = header.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw Error(ErrorCode::UnsupportedVersion,
                  "model file version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kModelFormatVersion) + ")");
    Architecture arch;
    const auto& in = header.at("input");
    arch.input = Shape{in.at(0).get<std::size_t>(), in.at(1).get<std::size_t>(),
                       in.at(2).get<std::size_t>()};
    for (const auto& l : header.at("layers")) {
      LayerSpec spec;
      spec.kind = kind_from(l.at("type").get<std::string>(), header_at);
      spec.out = l.at("out").get<std::size_t>();
      spec.kernel = l.at("kernel").get<std::size_t>();
      spec.stride = l.at("stride").get<std::size_t>();
      spec.padding = l.at("padding").get<std::size_t>();
      arch.layers.push_back(spec);
    }
    const auto classes = header.at("classes").get<std::size_t>();
    const auto seed = header.at("seed").get<std::uint64_t>();

    std::vector<LayerParams> params(arch.layers.size());
    for (const auto& block : header.at("blocks")) {
      const auto layer = block.at("layer").get<std::size_t>();
      const auto name = block.at("name").get<std::string>();
      const auto count = block.at("count").get<std::size_t>();
      if (layer >= params.size() || (name != "weight" && name != "bias"))
        throw ParseError(header_at, "model header: bad block descriptor");
      if (count > (bytes.size() - cursor) / 8)
        throw ParseError(cursor, "model file truncated inside '" + name + "' block of layer " +
                                     std::to_string(layer));
      Vector& dst = name == "weight" ? params[layer].weight : params[layer].bias;
      dst.resize(count);
      for (std::size_t i = 0; i < count; ++i, cursor += 8)
        dst[i] = io::get_le<double>(bytes.data() + cursor);
    }
    if (cursor != bytes.size()) throw ParseError(cursor, "trailing bytes after last weight block");
    model = std::make_shared<Network>(std::move(arch), classes, seed, std::move(params));
  } catch (const json::exception& e) {
    throw ParseError(header_at, std::string("model header: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnsupportedVersion) throw;
    throw ParseError(cursor, std::string("model file inconsistent: ") + e.what());
  }
  return model;
}

void save_model(const Network& model, const std::string& path) {
  io::write_file(path, serialize_model(model));
}

std::shared_ptr<Network> load_model(const std::string& path) {
  const auto bytes = io::read_file(path);
  return deserialize_model(bytes);
}

}  // namespace gfcs
