import assert from 'node:assert/strict';
import { test } from 'node:test';

import { configText } from '../src/index';

test('config serializes to sorted key = value lines', () => {
  const text = configText({ 'sim.s_max': 30, enabled: 'geo,shape', 'geo.pad_px': 7 });
  assert.equal(text, 'enabled = geo,shape\ngeo.pad_px = 7\nsim.s_max = 30\n');
});

test('empty mapping serializes to empty text', () => {
  assert.equal(configText({}), '');
});
