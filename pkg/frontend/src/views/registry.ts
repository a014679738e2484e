/** Maps a decoded route to its API call and view renderer. */

import { ApiClient, Envelope } from "../api.js";
import { Route } from "../state.js";
import { ViewContext } from "./context.js";
import { renderDashboard } from "./dashboard.js";
import { renderFetch } from "./fetch.js";
import { renderHidden } from "./hidden.js";
import { renderPartnerships } from "./partnerships.js";
import { renderPooling } from "./pooling.js";
import { renderRelationships } from "./relationships.js";

export interface ToolOutcome {
  element: HTMLElement;
  envelope: Envelope<unknown> | null;
}

export async function renderTool(
  route: Route,
  api: ApiClient,
  ctx: ViewContext,
): Promise<ToolOutcome> {
  switch (route.tool) {
    case "DASHBOARD": {
      const envelope = await api.stats(route.snapshot);
      return { element: renderDashboard(envelope, ctx), envelope };
    }
    case "POOLING": {
      const { network, id } = route.params;
      const envelope =
        network && id ? await api.pooling(network, id, route.snapshot) : null;
      return { element: renderPooling(route.params, envelope, ctx), envelope };
    }
    case "HIDDEN_INTERMEDIARY": {
      const envelope = route.params.domain
        ? await api.hidden(route.params.domain, route.snapshot)
        : null;
      return { element: renderHidden(route.params, envelope, ctx), envelope };
    }
    case "PARTNERSHIPS": {
      const envelope = route.params.domain
        ? await api.partnerships(route.params.domain, route.snapshot)
        : null;
      return { element: renderPartnerships(route.params, envelope, ctx), envelope };
    }
    case "RELATIONSHIPS": {
      const envelope = route.params.domain
        ? await api.relationships(route.params.domain, route.snapshot)
        : null;
      return { element: renderRelationships(route.params, envelope, ctx), envelope };
    }
    case "LIVE_FETCH": {
      const envelope = route.params.domain
        ? await api.fetchFile(route.params.domain, route.params.kind ?? "ads.txt")
        : null;
      return { element: renderFetch(route.params, envelope, ctx), envelope };
    }
  }
}

export function queryLabel(route: Route): string | null {
  switch (route.tool) {
    case "POOLING":
      return route.params.network && route.params.id
        ? `pooling ${route.params.network}/${route.params.id}`
        : null;
    case "HIDDEN_INTERMEDIARY":
      return route.params.domain ? `hidden ${route.params.domain}` : null;
    case "PARTNERSHIPS":
      return route.params.domain ? `partners ${route.params.domain}` : null;
    case "RELATIONSHIPS":
      return route.params.domain ? `relationships ${route.params.domain}` : null;
    case "LIVE_FETCH":
      return route.params.domain
        ? `fetch ${route.params.domain}/${route.params.kind ?? "ads.txt"}`
        : null;
    case "DASHBOARD":
      return null;
  }
}
