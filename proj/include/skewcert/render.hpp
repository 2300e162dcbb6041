#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewcert/boxgraph.hpp"

namespace skewcert {

class RenderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Window {
    double re_lo, re_hi, im_lo, im_hi;
};

struct RenderSpec {
    std::optional<Complex> z_point;  // selects every z-cell containing it
    std::optional<CellId> z_cell;    // or one cell explicitly
    int width = 512;
    int height = 512;
    std::optional<Window> window;  // default: the whole w-domain
};

struct FiberImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;        // row-major, top row first
    std::vector<CellId> z_cells;          // the selected column
    std::vector<std::size_t> components;  // components present, ascending
    std::vector<std::uint8_t> gray;       // gray level of each entry of `components`

    /// Binary portable pixmap (P6).
    std::string ppm() const;
};

/// Paints every w-box of a fibered model over the selected z-cells in its
/// component's gray level on a white background. Throws RenderError when the
/// selector lies outside the z-grid or the column holds no boxes.
FiberImage render_fiber(const ChainModel& model, const RenderSpec& spec);

/// Boxes of one component in the rendered column.
std::vector<BoxId> column_boxes(const ChainModel& model, const FiberImage& image, std::size_t component);

}  // namespace skewcert
