/** Typed client for the /api/v1 endpoints.
 *
 * The console renders payloads verbatim; every number shown on screen
 * originates in one of these response types, never in client-side
 * arithmetic.
 */

export type EnvelopeStatus = "OK" | "NOT_FOUND" | "INVALID_INPUT" | "UPSTREAM_ERROR";

export interface Envelope<P> {
  status: EnvelopeStatus;
  snapshot_id: string | null;
  generated_at: string;
  payload: P | null;
  error?: string;
}

export interface SellerEntry {
  seller_id: string;
  seller_type: string;
  name: string | null;
  domain: string | null;
  is_confidential: boolean;
}

export interface PoolSummary {
  network: string;
  account_id: string;
  size: number;
  members: string[];
  tags: string[];
  reseller_declarers: string[];
}

export interface PoolingPayload {
  network: string;
  account_id: string;
  direct_declarers: string[];
  reseller_declarers: string[];
  seller_entry: SellerEntry | null;
  pool: PoolSummary | null;
}

export interface HiddenFinding {
  subject: string;
  publisher_listings: [string, string][];
  intermediary_listings: [string, string][];
  named_client_count: number;
  verified: boolean;
  weak: boolean;
  snapshot_id: string;
}

export interface HiddenCriteria {
  serves_sellers_json: boolean;
  has_named_client: boolean;
  listed_as_publisher: boolean;
  listed_as_intermediary: boolean;
}

export interface HiddenPayload {
  domain: string;
  finding: HiddenFinding | null;
  criteria: HiddenCriteria;
}

export interface PartnershipsPayload {
  query_domain: string;
  partners: Record<string, [string, string][]>;
}

export interface RelationshipsPayload {
  query_domain: string;
  claimed_networks: [string, string, string][];
  acknowledging_networks: [string, string, string][];
}

export interface FetchSummary {
  records?: number;
  variables?: number;
  entries?: number;
  confidential_entries?: number;
  findings: { severity: string; code: string; message: string }[];
}

export interface FetchPayload {
  domain: string;
  kind: string;
  final_url: string | null;
  raw: string;
  summary: FetchSummary;
}

export interface FractionValue {
  value: number;
  exact: [number, number];
}

export interface StatsPayload {
  snapshot_id: string | null;
  corpus: {
    ads_files: number;
    sellers_files: number;
    ads_records: number;
    seller_entries: number;
    distinct_direct_ids: number;
    sellers_fetch_failures: number;
  };
  pooling: {
    pool_count: number;
    dark_pool_count: number;
    mean_pool_size: FractionValue | null;
    median_pool_size: FractionValue | null;
    tagged_pool_counts: Record<string, number>;
  };
  intermediaries: {
    mismatch_count: number;
    mismatched_id_count: number;
    unacknowledged_id_count: number;
    hidden_intermediary_count: number;
    verified_hidden_intermediary_count: number;
    unresolvable_intermediary_count: number;
    distributed_direct_id_count: number;
    graph_edge_count: number;
    excluded_copied_file_count: number;
    confidential_entry_fraction: FractionValue | null;
  };
  top_overused_ids: {
    network: string;
    account_id: string;
    declared_owner: string | null;
    website_count: number;
  }[];
  top_hidden_intermediaries: {
    subject: string;
    publisher_listing_count: number;
    intermediary_listing_count: number;
    verified: boolean;
    weak: boolean;
  }[];
}

export interface ApiClient {
  stats(snapshot?: string): Promise<Envelope<StatsPayload>>;
  pooling(network: string, accountId: string, snapshot?: string): Promise<Envelope<PoolingPayload>>;
  hidden(domain: string, snapshot?: string): Promise<Envelope<HiddenPayload>>;
  partnerships(domain: string, snapshot?: string): Promise<Envelope<PartnershipsPayload>>;
  relationships(domain: string, snapshot?: string): Promise<Envelope<RelationshipsPayload>>;
  fetchFile(domain: string, kind: string): Promise<Envelope<FetchPayload>>;
}

type FetchLike = (input: string) => Promise<{ json(): Promise<unknown> }>;

export class HttpApiClient implements ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input) => globalThis.fetch(input),
  ) {}

  private async get<P>(path: string, snapshot?: string): Promise<Envelope<P>> {
    const suffix = snapshot ? `${path.includes("?") ? "&" : "?"}snapshot=${encodeURIComponent(snapshot)}` : "";
    const response = await this.fetchFn(`${this.base}${path}${suffix}`);
    return (await response.json()) as Envelope<P>;
  }

  stats(snapshot?: string) {
    return this.get<StatsPayload>("/api/v1/stats", snapshot);
  }

  pooling(network: string, accountId: string, snapshot?: string) {
    return this.get<PoolingPayload>(
      `/api/v1/pooling/${encodeURIComponent(network)}/${encodeURIComponent(accountId)}`,
      snapshot,
    );
  }

  hidden(domain: string, snapshot?: string) {
    return this.get<HiddenPayload>(
      `/api/v1/hidden-intermediary/${encodeURIComponent(domain)}`,
      snapshot,
    );
  }

  partnerships(domain: string, snapshot?: string) {
    return this.get<PartnershipsPayload>(
      `/api/v1/partnerships/${encodeURIComponent(domain)}`,
      snapshot,
    );
  }

  relationships(domain: string, snapshot?: string) {
    return this.get<RelationshipsPayload>(
      `/api/v1/relationships/${encodeURIComponent(domain)}`,
      snapshot,
    );
  }

  fetchFile(domain: string, kind: string) {
    return this.get<FetchPayload>(
      `/api/v1/fetch/${encodeURIComponent(domain)}/${encodeURIComponent(kind)}`,
    );
  }
}
