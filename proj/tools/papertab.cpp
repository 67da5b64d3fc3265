// Rectifies webcam frames of a sheet of paper into whiteboard-style output.
//
//   ffmpeg -i lecture.mp4 -f image2pipe -vcodec ppm - | papertab > out.pgm
//
// Exit codes: 0 ok, 2 configuration error, 3 I/O error, 4 no frame ever
// produced a quad.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "papertab/pipeline.hpp"

using namespace papertab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoQuad = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bird's-eye whiteboard output from oblique webcam frames"};

  PipelineConfig config;
  std::string frames_dir, masks_dir, masks_stream, out_dir, corners_path;
  std::string paper = "a4", output = "ink", seg = "classical";
  int window = 0, offset_c = -1;
  long min_area = 0;
  double max_area_frac = 0.0;

  app.add_option("--frames-dir", frames_dir,
                 "Read frame_NNNNNN.ppm|pgm from a directory instead of stdin");
  app.add_option("--masks-dir", masks_dir, "Directory of mask_NNNNNN.pgm");
  app.add_option("--masks-stream", masks_stream,
                 "File of concatenated P5 masks");
  app.add_option("--out-dir", out_dir, "Write frame_NNNNNN.pgm here");
  app.add_option("--emit-corners", corners_path, "Corner sidecar file");
  app.add_flag("--left-handed", config.left_handed,
               "Writer's hand enters from the left");
  app.add_option("--paper", paper, "Output aspect")
      ->check(CLI::IsMember({"a4", "letter", "estimate"}));
  app.add_option("--output-height", config.output_height, "Output rows");
  app.add_option("--window", window, "Adaptive threshold window (odd)");
  app.add_option("--offset-c", offset_c, "Adaptive threshold offset");
  app.add_option("--min-area", min_area, "Smallest kept ink component (px)");
  app.add_option("--max-area-frac", max_area_frac,
                 "Largest kept ink component (fraction of output)");
  app.add_option("--alpha", config.alpha, "Corner smoothing weight");
  app.add_option("--jump-threshold", config.jump_threshold,
                 "Outlier jump, fraction of the frame diagonal");
  app.add_option("--output", output, "Output kind")
      ->check(CLI::IsMember({"ink", "gray"}));
  app.add_option("--seg", seg, "Paper segmentation source")
      ->check(CLI::IsMember({"classical", "external"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (paper == "a4") {
    config.paper = RectMode::fixed(210.0 / 297.0);
  } else if (paper == "letter") {
    config.paper = RectMode::fixed(8.5 / 11.0);
  } else {
    config.paper = RectMode::estimated();
  }
  config.output = output == "gray" ? OutputKind::WarpedGray : OutputKind::Ink;
  config.segmentation = seg == "external" ? SegmentationKind::External
                                          : SegmentationKind::Classical;
  if (window != 0) config.window = window;
  if (offset_c >= 0) config.offset_c = offset_c;
  if (min_area != 0) {
    if (min_area < 1) {
      std::cerr << "papertab: --min-area must be >= 1\n";
      return kExitConfig;
    }
    config.min_area = static_cast<std::size_t>(min_area);
  }
  if (max_area_frac != 0.0) config.max_area_frac = max_area_frac;
  config.emit_corners = !corners_path.empty();

  try {
    config.validate();
    if (config.segmentation == SegmentationKind::External &&
        masks_dir.empty() == masks_stream.empty()) {
      throw Error(ErrorCode::InvalidConfig,
                  "--seg external needs exactly one of --masks-dir or "
                  "--masks-stream");
    }

    std::unique_ptr<FrameSource> frames;
    if (frames_dir.empty()) {
      std::ios::sync_with_stdio(false);
      frames = std::make_unique<PnmStreamSource>(std::cin);
    } else {
      frames = std::make_unique<DirectorySource>(frames_dir, "frame");
    }

    std::ifstream mask_file;
    std::unique_ptr<FrameSource> masks;
    if (config.segmentation == SegmentationKind::External) {
      if (!masks_dir.empty()) {
        masks = std::make_unique<DirectorySource>(masks_dir, "mask");
      } else {
        mask_file.open(masks_stream, std::ios::binary);
        if (!mask_file) {
          throw Error(ErrorCode::IoError, "cannot open " + masks_stream);
        }
        masks = std::make_unique<PnmStreamSource>(mask_file);
      }
    }

    std::unique_ptr<FrameSink> sink;
    if (out_dir.empty()) {
      sink = std::make_unique<PnmStreamSink>(std::cout);
    } else {
      sink = std::make_unique<DirectorySink>(out_dir);
    }

    std::ofstream corners;
    if (config.emit_corners) {
      corners.open(corners_path);
      if (!corners) throw Error(ErrorCode::IoError, "cannot create " + corners_path);
    }

    const StreamSummary summary =
        run_stream(*frames, *sink, config, masks.get(),
                   config.emit_corners ? &corners : nullptr);

    for (const auto& err : summary.errors) std::cerr << err << '\n';
    std::fprintf(stderr,
                 "frames %zu  failures %zu  low_confidence %zu  "
                 "segment %.2f ms  quad %.2f ms  warp %.2f ms  cleanup %.2f ms"
                 "  (%.1f fps)\n",
                 summary.frames, summary.failures, summary.low_confidence,
                 summary.mean.segment_ms, summary.mean.quad_ms,
                 summary.mean.warp_ms, summary.mean.cleanup_ms,
                 summary.frames_per_second());
    if (summary.frames > 0 && !summary.any_quad()) return kExitNoQuad;
    return 0;
  } catch (const Error& e) {
    std::cerr << "papertab: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig ? kExitConfig : kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "papertab: " << e.what() << '\n';
    return kExitIo;
  }
}
