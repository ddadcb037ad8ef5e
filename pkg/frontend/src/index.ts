export { BoundaryError, EngineError } from './errors';
export { VolumeShape, VolumeView, batchViews, decodeEvth, encodeEvth } from './volume';
export { ConfigMapping, configText } from './config';
export { EngineOptions, boundCompose, boundComposeBatch } from './compose';
