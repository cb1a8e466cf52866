#pragma once

#include <filesystem>
#include <string>

#include "collasprite/nn/container.hpp"
#include "collasprite/nn/discriminator.hpp"
#include "collasprite/nn/generator.hpp"

namespace collasprite::nn {

template <typename T>
void add_layout_tensors(ContainerWriter& writer, const ParamLayout& layout, const T* params,
                        const std::string& prefix = "") {
  for (const ParamSpec& spec : layout.specs())
    writer.add_values(prefix + spec.name, spec.shape, params + spec.offset, spec.count);
}

// Restores a flat parameter array from a container, insisting that every
// layout tensor matches by name and shape. The first mismatch is reported by
// name so config drift is easy to diagnose.
template <typename T>
void read_layout_tensors(const Container& container, const ParamLayout& layout, T* params,
                         const std::string& prefix = "") {
  for (const ParamSpec& spec : layout.specs()) {
    std::string name = prefix + spec.name;
    const TensorEntry* entry = container.find(name);
    require(entry != nullptr, "weight container is missing tensor '", name, "'");
    require(entry->shape == spec.shape, "tensor '", name,
            "' does not match the model config (layer shape mismatch)");
    container.read_values(*entry, params + spec.offset, spec.count);
  }
}

template <typename T>
void save_generator(const std::filesystem::path& path, const Generator<T>& g) {
  nlohmann::json meta;
  meta["config"] = g.config().to_json();
  ContainerWriter writer("generator-weights", meta);
  add_layout_tensors(writer, g.layout(), g.params().data());
  writer.write(path);
}

template <typename T>
Generator<T> load_generator(const std::filesystem::path& path) {
  Container c = Container::read(path);
  require(c.kind() == "generator-weights", "expected generator weights, found '", c.kind(),
          "' in ", path.string());
  Generator<T> g(GeneratorConfig::from_json(c.meta().at("config")));
  read_layout_tensors(c, g.layout(), g.params().data());
  return g;
}

template <typename T>
void load_generator_into(const Container& c, Generator<T>& g, const std::string& prefix = "") {
  read_layout_tensors(c, g.layout(), g.params().data(), prefix);
}

template <typename T>
void save_discriminator(const std::filesystem::path& path, const Discriminator<T>& d) {
  nlohmann::json meta;
  meta["config"] = d.config().to_json();
  ContainerWriter writer("discriminator-weights", meta);
  add_layout_tensors(writer, d.layout(), d.params().data());
  writer.write(path);
}

template <typename T>
Discriminator<T> load_discriminator(const std::filesystem::path& path) {
  Container c = Container::read(path);
  require(c.kind() == "discriminator-weights", "expected discriminator weights, found '",
          c.kind(), "' in ", path.string());
  Discriminator<T> d(DiscriminatorConfig::from_json(c.meta().at("config")));
  read_layout_tensors(c, d.layout(), d.params().data());
  return d;
}

}  // namespace collasprite::nn
