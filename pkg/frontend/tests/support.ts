/** Test support: fixture payloads captured from the fixture-backed
 * backend (see scripts/export_ui_fixtures.py in the repository root)
 * and a mock API client that replays them. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { ApiClient, Envelope } from "../src/api.js";
import { initApp, type App } from "../src/app.js";

const HERE = dirname(fileURLToPath(import.meta.url));

export function fixture<T = Envelope<unknown>>(name: string): T {
  return JSON.parse(readFileSync(join(HERE, "fixtures", `${name}.json`), "utf8")) as T;
}

type OverrideTable = Partial<Record<string, unknown>>;

export interface MockApi extends ApiClient {
  calls: string[];
}

/** Replays captured envelopes; specific (method, args) responses can be
 * overridden per test via the table. */
export function mockApi(overrides: OverrideTable = {}): MockApi {
  const calls: string[] = [];

  function pick<T>(key: string, fallback: () => T): Promise<T> {
    calls.push(key);
    const hit = overrides[key];
    return Promise.resolve((hit !== undefined ? hit : fallback()) as T);
  }

  return {
    calls,
    stats: () => pick("stats", () => fixture("stats")),
    pooling: (network, id) =>
      pick(`pooling ${network} ${id}`, () =>
        id === "pub-3176064900167527" ? fixture("pooling_google") : fixture("pooling_unknown"),
      ),
    hidden: (domain) =>
      pick(`hidden ${domain}`, () =>
        domain === "smaato.com" ? fixture("hidden_smaato") : fixture("hidden_negative"),
      ),
    partnerships: (domain) =>
      pick(`partnerships ${domain}`, () =>
        domain === "gbnews.uk"
          ? fixture("partnerships_gbnews")
          : fixture("partnerships_member"),
      ),
    relationships: (domain) =>
      pick(`relationships ${domain}`, () =>
        domain === "mangaread.org"
          ? fixture("relationships_mangaread")
          : fixture("relationships_member"),
      ),
    fetchFile: (domain, kind) =>
      pick(`fetch ${domain} ${kind}`, () => fixture("fetch_yahoo")),
  };
}

export async function mountApp(api: ApiClient, hash = "#/dashboard"): Promise<App> {
  document.body.innerHTML = '<div id="app"></div>';
  location.hash = hash;
  const app = initApp(document.getElementById("app")!, api);
  await app.rerender();
  return app;
}

/** Simulate following a rendered link: browsers apply fragment hrefs to
 * location; jsdom does not, so the test does it explicitly. */
export async function follow(app: App, anchor: HTMLAnchorElement): Promise<void> {
  const href = anchor.getAttribute("href");
  if (!href) throw new Error("anchor without href");
  await app.navigate(href);
}

export function byText(root: ParentNode, selector: string, text: string): HTMLElement {
  const match = Array.from(root.querySelectorAll<HTMLElement>(selector)).find(
    (node) => node.textContent === text,
  );
  if (!match) throw new Error(`no ${selector} with text ${JSON.stringify(text)}`);
  return match;
}
