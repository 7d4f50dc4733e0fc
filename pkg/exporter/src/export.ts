// Orchestration: emit the GVGG weight file, golden GFCH features for the
// fixture images, and a manifest tying the two together.

import * as crypto from "crypto";
import * as fs from "fs";
import * as path from "path";
import { encodeGfch, encodeGvgg, ConvLayerWeights, GoldenSample } from "./binary";
import { FEATURE_DIM } from "./architecture";
import { extractFeatures } from "./model";
import { preprocess } from "./preprocess";
import { syntheticWeights } from "./weights";

export const PREPROCESSING_RECIPE =
  "resize 224 bilinear half-pixel centers, RGB, /255, no mean subtraction";

export interface ExportManifest {
  source_model_id: string;
  gvgg_sha256: string;
  preprocessing: string;
  fixtures: Array<{ image: string; label: number; class_name: string }>;
  goldens_path: string;
}

export function listFixtures(dir: string): Array<{ file: string; className: string }> {
  // fixture naming: <class_name>__<anything>.png; files sort lexicographically
  const files = fs
    .readdirSync(dir)
    .filter((f) => f.toLowerCase().endsWith(".png"))
    .sort();
  return files.map((f) => ({ file: f, className: f.split("__")[0] }));
}

export async function runExport(opts: {
  weightsOut: string;
  goldensOut: string;
  fixturesDir: string;
  manifestOut: string;
  seed: number;
}): Promise<ExportManifest> {
  const layers: ConvLayerWeights[] = syntheticWeights(opts.seed);
  const sourceId = `synthetic-he-gaussian-seed-${opts.seed}`;

  const gvgg = encodeGvgg(layers);
  fs.writeFileSync(opts.weightsOut, gvgg);
  const sha256 = crypto.createHash("sha256").update(gvgg).digest("hex");

  const fixtures = listFixtures(opts.fixturesDir);
  if (fixtures.length < 5) {
    throw new Error(`need >= 5 fixture images, found ${fixtures.length}`);
  }
  const classNames = Array.from(new Set(fixtures.map((f) => f.className))).sort();

  const samples: GoldenSample[] = [];
  for (const fixture of fixtures) {
    const imagePath = path.join(opts.fixturesDir, fixture.file);
    const image = preprocess(imagePath);
    const features = await extractFeatures(image, layers);
    samples.push({
      label: classNames.indexOf(fixture.className),
      sourcePath: fixture.file,
      features,
    });
    process.stderr.write(`golden: ${fixture.file}\n`);
  }
  fs.writeFileSync(opts.goldensOut, encodeGfch(classNames, FEATURE_DIM, samples));

  const manifest: ExportManifest = {
    source_model_id: sourceId,
    gvgg_sha256: sha256,
    preprocessing: PREPROCESSING_RECIPE,
    fixtures: samples.map((s) => ({
      image: s.sourcePath,
      label: s.label,
      class_name: classNames[s.label],
    })),
    goldens_path: opts.goldensOut,
  };
  fs.writeFileSync(opts.manifestOut, JSON.stringify(manifest, null, 2) + "\n");
  return manifest;
}
