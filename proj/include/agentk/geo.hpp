#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentk/common.hpp"

namespace agentk::geo {

/// Plain RGB8 raster; the vision backend owns perception content, this
/// module owns geometry and control flow.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // 3 * width * height

    static Image solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);
    bool empty() const { return width <= 0 || height <= 0; }
    std::size_t pixel_offset(int x, int y) const;
    void set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
    std::array<std::uint8_t, 3> pixel(int x, int y) const;
    void fill_rect(int x, int y, int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

/// Normalized [0,1] crop rectangle, diagonal corners.
struct RelBox {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    void validate() const;
};

/// Absolute pixel rectangle in a concrete image.
struct PixelBox {
    int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    int width() const { return x_max - x_min; }
    int height() const { return y_max - y_min; }
};

struct GeoPose {
    double lat = 0;      // degrees, [-90, 90]
    double lon = 0;      // degrees, (-180, 180]
    double heading = 0;  // degrees clockwise from north, [0, 360)
};

struct Panorama {
    std::array<Image, 4> tiles;  // headings base, base+90, base+180, base+270
    Image composite;             // left-to-right concatenation, 4w x h
    double base_heading = 0;
    int tile_width = 0;
    int tile_height = 0;
};

constexpr double kEarthRadiusM = 6371000.0;

double normalize_heading(double degrees);
double normalize_lon(double degrees);

/// X_i = x_i * W, Y_i = y_i * H with round-half-up, clamped to the image.
PixelBox to_absolute(const RelBox& r, int width, int height);

Image crop(const Image& image, const PixelBox& box);

Panorama stitch_panorama(const std::vector<Image>& tiles, double base_heading);

/// Local flat-earth displacement: dLat = d*cos(b)/R, dLon = d*sin(b)/(R*cos(lat)).
/// Heading is unchanged. Valid away from the poles (|lat| < 89 deg).
GeoPose displace(const GeoPose& pose, double distance_m, double bearing_deg);

/// Compass heading of a crop's horizontal center within the panorama:
/// (base + 360 * center_x / composite_width) mod 360.
double bearing_from_crop(const PixelBox& box, const Panorama& pano);

struct VisionReply {
    bool is_answer = false;
    std::string answer;
    RelBox box;
};

class VisionBackend {
public:
    virtual ~VisionBackend() = default;
    virtual VisionReply refine_or_answer(const Image& image, const std::string& question) = 0;
    virtual bool confirm_target(const Image& image, const std::string& target) = 0;
};

struct RefineResult {
    std::string answer;
    int crops = 0;
    bool depth_exceeded = false;
    std::vector<PixelBox> crop_boxes;
};

/// Refine-or-answer loop: the backend either answers or names a region; a
/// region is cropped and re-queried. At most max_depth refine replies.
RefineResult refine_image(const Image& image, const std::string& question, VisionBackend& vlm,
                          int max_depth = 3);

struct LocateResult {
    bool found = false;
    PixelBox box;
    int queries = 0;
};

/// Scans six half-overlapping windows of width composite/4 across the
/// panorama, querying the backend in batches of at most max_parallel.
LocateResult locate_target(const Panorama& pano, const std::string& target, VisionBackend& vlm,
                           std::size_t max_parallel = 5);

/// Deterministic offline street-view imagery: a JSON world file maps
/// (lat, lon, heading) keys — coordinates rounded to 1e-5 degrees — to
/// procedurally drawn tiles.
class StreetWorld {
public:
    static StreetWorld load_file(const std::string& path);
    static StreetWorld parse(const json& j);

    Image tile_at(const GeoPose& pose) const;
    Panorama panorama_at(const GeoPose& pose) const;

    int tile_width() const { return tile_width_; }
    int tile_height() const { return tile_height_; }

    static std::string pose_key(double lat, double lon, double heading);

private:
    struct TileSpec {
        std::array<std::uint8_t, 3> fill{128, 128, 128};
        struct Feature {
            int x = 0, y = 0, w = 0, h = 0;
            std::array<std::uint8_t, 3> color{0, 0, 0};
            std::string label;
        };
        std::vector<Feature> features;
    };

    Image render(const TileSpec& spec) const;

    int tile_width_ = 64;
    int tile_height_ = 48;
    std::array<std::uint8_t, 3> default_fill_{128, 128, 128};
    std::map<std::string, TileSpec> tiles_;
};

}  // namespace agentk::geo
