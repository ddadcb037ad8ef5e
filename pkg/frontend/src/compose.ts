/**
 * Augmentation entry points, bridged to the engine's batch CLI.
 *
 * Each call lays out a temporary corpus (sample index = zero-padded file
 * position, which is how the engine derives per-sample random streams from
 * the master seed), runs `augment`, and reads the EVTH results back. The
 * output is therefore bit-identical to invoking the CLI on the same bytes
 * with the same seed. Calls share no mutable state and may run concurrently.
 */

import { execFile } from 'node:child_process';
import { mkdtemp, readFile, rm, writeFile, mkdir } from 'node:fs/promises';
import { tmpdir } from 'node:os';
import * as path from 'node:path';

import { ConfigMapping, configText } from './config';
import { EngineError } from './errors';
import { VolumeView, decodeEvth, encodeEvth } from './volume';

export interface EngineOptions {
  /** Command vector for the engine CLI; default `python3 -m evaug` or $EVAUG_CLI. */
  cli?: string[];
  /** Robustness variant instead of the training composition. */
  variant?: 'plain' | 'geo' | 'drop' | 'shape';
  /** Leave the temporary corpus on disk (debugging). */
  keepTemp?: boolean;
}

function engineCommand(opts?: EngineOptions): string[] {
  if (opts?.cli && opts.cli.length) {
    return opts.cli;
  }
  const fromEnv = process.env.EVAUG_CLI;
  if (fromEnv && fromEnv.trim()) {
    return fromEnv.trim().split(/\s+/);
  }
  return ['python3', '-m', 'evaug'];
}

function run(cmd: string[], args: string[]): Promise<void> {
  return new Promise((resolve, reject) => {
    execFile(cmd[0], [...cmd.slice(1), ...args], { maxBuffer: 1 << 24 }, (err, _stdout, stderr) => {
      if (err) {
        reject(new EngineError(`engine invocation failed: ${err.message}\n${stderr}`));
      } else {
        resolve();
      }
    });
  });
}

function sampleName(index: number): string {
  return `${String(index).padStart(6, '0')}.evth`;
}

/**
 * Augment a batch of volumes; sample i uses the random stream derived from
 * (seed, i), matching corpus semantics.
 */
export async function boundComposeBatch(
  views: readonly VolumeView[],
  config: ConfigMapping,
  seed: number,
  opts?: EngineOptions,
): Promise<VolumeView[]> {
  if (!views.length) {
    return [];
  }
  if (!Number.isInteger(seed)) {
    throw new EngineError(`seed must be an integer, got ${seed}`);
  }
  const root = await mkdtemp(path.join(tmpdir(), 'evaug-'));
  try {
    const inDir = path.join(root, 'in');
    const outDir = path.join(root, 'out');
    await mkdir(inDir);
    await Promise.all(
      views.map((view, i) => writeFile(path.join(inDir, sampleName(i)), encodeEvth(view))),
    );
    const configPath = path.join(root, 'pipeline.cfg');
    await writeFile(configPath, configText(config), 'utf8');
    const args = [
      'augment', inDir, outDir,
      '--config', configPath,
      '--seed', String(seed),
      '--threads', '1',
    ];
    if (opts?.variant) {
      args.push('--variant', opts.variant);
    }
    await run(engineCommand(opts), args);
    const results: VolumeView[] = [];
    for (let i = 0; i < views.length; i++) {
      const bytes = await readFile(path.join(outDir, sampleName(i)));
      results.push(decodeEvth(bytes));
    }
    return results;
  } finally {
    if (!opts?.keepTemp) {
      await rm(root, { recursive: true, force: true });
    }
  }
}

/** Augment one volume (batch of one: the sample index is 0). */
export async function boundCompose(
  view: VolumeView,
  config: ConfigMapping,
  seed: number,
  opts?: EngineOptions,
): Promise<VolumeView> {
  const [result] = await boundComposeBatch([view], config, seed, opts);
  return result;
}
