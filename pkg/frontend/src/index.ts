export * from './types';
export * from './validate';
export * from './drafts';
export * from './client';
export * from './plan';
export * from './render';
export * from './session';
