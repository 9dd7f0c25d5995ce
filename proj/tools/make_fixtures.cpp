// Writes the bundled sketches: the three-mark case study and a square with
// one mark on its right wall.
#include "sketchopt/raster.hpp"
#include "sketchopt/synth.hpp"

#include <filesystem>
#include <iostream>

using namespace sketchopt;

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(dir);

  save_png(synth::rasterize(synth::case_study_plan()), dir / "case_study.png");

  synth::Plan square;
  square.width = 256;
  square.height = 256;
  square.walls = {{{48, 48}, {208, 48}, 3, 0.9},
                  {{208, 48}, {208, 208}, 3, 0.9},
                  {{48, 208}, {208, 208}, 3, 0.9},
                  {{48, 48}, {48, 208}, 3, 0.9}};
  square.marks = {{{184, 128}, {232, 128}, 16.0, 2, 0.9}};
  save_png(synth::rasterize(square), dir / "square_mark.png");

  std::cout << "wrote fixtures to " << dir.string() << "\n";
  return 0;
}
