#pragma once

#include <string>
#include <vector>

#include "artic/losses.hpp"
#include "artic/model.hpp"
#include "artic/synth.hpp"
#include "artic/trainer.hpp"

namespace artic {

// Every reader throws IoError on missing files or malformed content; every
// writer throws IoError when the file cannot be produced. All formats are
// described in the README and are byte-deterministic for identical inputs.

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// 8-bit RGB PNG.
void write_png_rgb(const std::string& path, const Image<Rgb8>& img);
Image<Rgb8> read_png_rgb(const std::string& path);

/// 16-bit grayscale PNG holding part labels.
void write_png_mask(const std::string& path, const Image<std::uint16_t>& img);
Image<std::uint16_t> read_png_mask(const std::string& path);

/// Raw depth: u32 little-endian width and height, then width*height
/// float32 little-endian values in row-major order.
void write_depth(const std::string& path, const Image<float>& img);
Image<float> read_depth(const std::string& path);

/// Scene directory round-trip. Layout: spec.json, gt_joints.json,
/// matches.csv, and per view state{0,1}/view_###.{rgb.png, depth.f32,
/// mask.png, cam.json}. Loading reproduces the generated scene exactly.
void save_scene(const std::string& dir, const SceneData& data);
SceneData load_scene(const std::string& dir);

/// Trained-model checkpoint, versioned JSON.
void save_checkpoint(const std::string& path, const SceneModel& model);
SceneModel load_checkpoint(const std::string& path);

/// Flat key = value training configuration. Serialization writes every
/// field; parsing starts from defaults, accepts any subset, and rejects
/// unknown keys. config_hash is a stable fingerprint of the canonical
/// serialization.
std::string config_to_text(const TrainConfig& cfg);
TrainConfig config_from_text(const std::string& text);
std::string config_hash(const TrainConfig& cfg);

/// ASCII PLY point cloud; colors optional, parallel to points.
void write_ply(const std::string& path, const std::vector<Vec3>& points,
               const std::vector<Vec3>* colors = nullptr);

/// Per-step loss table as CSV.
std::string training_log_csv(const std::vector<TrainLogRow>& log);

}  // namespace artic
