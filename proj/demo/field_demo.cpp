// Renders a small multiplicative heat field on [0,1]x[0,1] and writes
// field_demo.csv plus field_demo.png into the working directory.

#include <fstream>
#include <iostream>

#include <stablechaos/stablechaos.hpp>

int main() {
  stablechaos::RunConfig cfg = stablechaos::parse_config(
      "equation = heat\n"
      "alpha = 0.7\n"
      "dim = 1\n"
      "atoms = 500\n"
      "mode = multiplicative\n"
      "t_points = 51\n"
      "x_points = 51\n");

  const stablechaos::FieldResult field = stablechaos::run_field(cfg);

  std::ofstream csv("field_demo.csv", std::ios::binary);
  stablechaos::write_field_csv(csv, field);
  stablechaos::write_binary_file("field_demo.png", stablechaos::field_png_bytes(field));

  double lo = field.values[0], hi = field.values[0];
  for (double v : field.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::cout << "wrote field_demo.csv / field_demo.png; field range [" << lo << ", " << hi
            << "]\n";
  return 0;
}
