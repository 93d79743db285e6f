// Wire types for the lookup service API.

export interface Meta {
  contributor?: string;
  updated?: string;
  [key: string]: unknown;
}

export interface ResourceItem {
  type: string;
  href: string;
  meta: Meta;
}

export interface DefinitionItem {
  text: string;
  meta: Meta;
}

export interface Location {
  x: number;
  y: number;
}

export interface Box {
  top: number;
  bottom: number;
  left: number;
  right: number;
}

export interface AnnotationItem {
  id: number;
  text: string;
  meta: Meta;
}

export interface PageBlock {
  number: number;
  src: string;
  width: number;
  height: number;
  missing?: boolean;
  location?: Location;
  boxes: Box[];
  annotations: AnnotationItem[];
}

export type Existence = "yes" | "no" | "maybe";

export interface DictionaryBlock {
  id: string;
  exists: Existence;
  pages: PageBlock[];
}

export interface SearchResponse {
  query: string;
  language: string;
  resources: ResourceItem[];
  definitions: DefinitionItem[];
  dictionaries: DictionaryBlock[];
}

export interface DictionaryInfo {
  id: string;
  title: string;
  page_count: number;
}

export interface LanguageInfo {
  code: string;
  display_name: string;
  direction: "ltr" | "rtl";
  keyboard_layout_ref: string;
  dictionaries: DictionaryInfo[];
}

export interface BucketInfo {
  prefix: string;
  count: number;
  terminal: boolean;
  leaf: boolean;
}

export interface PrefixResponse {
  language: string;
  prefix: string;
  buckets?: BucketInfo[];
  words?: string[];
}

export interface FeedbackAck {
  recorded: boolean;
  tally: { present: number; absent: number; status: string };
}

export interface MarkerAck {
  marker: {
    word: string;
    page: number;
    x: number;
    y: number;
    proposal_count: number;
    policy: string;
  };
}

export interface AnnotationAck {
  annotation: { id: number; page: number; word: string; text: string; meta: Meta };
}

export interface DigitizationAck {
  entry: {
    id: number;
    word: string;
    fields: Record<string, string>;
    boxes: Array<Box & { page: number }>;
    meta: Meta;
  };
}

export interface ApiError {
  code: string;
  message: string;
}
