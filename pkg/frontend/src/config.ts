/**
 * Pipeline configuration as a flat mapping with the same namespaced keys as
 * the engine's configuration file (`sim.*`, `geo.*`, `drop.*`, `enabled`,
 * `apply_prob`). Values may be strings, numbers or booleans; everything
 * serializes to `key = value` lines. Unknown keys are rejected by the
 * engine before it writes any output.
 */

export type ConfigMapping = Record<string, string | number | boolean>;

export function configText(config: ConfigMapping): string {
  return Object.keys(config)
    .sort()
    .map((key) => `${key} = ${String(config[key])}`)
    .join('\n') + (Object.keys(config).length ? '\n' : '');
}
