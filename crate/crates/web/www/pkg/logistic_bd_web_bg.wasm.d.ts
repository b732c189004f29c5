/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const ecdf_and_law: (a: number, b: number, c: number, d: bigint, e: number, f: bigint) => [number, number, number, number];
export const fluid_and_path: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number, number];
export const mean_over_theta: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
