import { z } from "zod";

/** Pixel-space crop rectangle, origin at the top-left corner of the image. */
export const boundingBoxSchema = z.object({
  x: z.number().int().min(0),
  y: z.number().int().min(0),
  width: z.number().int().min(1),
  height: z.number().int().min(1),
});

export type BoundingBox = z.infer<typeof boundingBoxSchema>;

const textItemSchema = z.object({
  id: z.number().int(),
  kind: z.literal("text"),
  payload: z.string().min(1),
});

const imageItemSchema = z.object({
  id: z.number().int(),
  kind: z.literal("image"),
  payload: z.object({
    path: z.string().min(1),
    box: boundingBoxSchema,
  }),
});

export const embedItemSchema = z.discriminatedUnion("kind", [
  textItemSchema,
  imageItemSchema,
]);

export type EmbedItem = z.infer<typeof embedItemSchema>;
export type TextItem = z.infer<typeof textItemSchema>;
export type ImageItem = z.infer<typeof imageItemSchema>;

export const DEFAULT_MODEL = "openai/clip-vit-large-patch14";

export const embedRequestSchema = z
  .object({
    items: z.array(embedItemSchema).min(1),
    model_name: z.string().min(1).default(DEFAULT_MODEL),
  })
  .superRefine((req, ctx) => {
    // box placement against the actual image is checked later, at encode
    // time; here we can only enforce what the document alone determines
    const seen = new Map<number, number>();
    req.items.forEach((item, index) => {
      const first = seen.get(item.id);
      if (first !== undefined) {
        ctx.addIssue({
          code: "custom",
          path: ["items", index, "id"],
          message: `duplicate id ${item.id} (first used by items[${first}])`,
        });
      } else {
        seen.set(item.id, index);
      }
    });
  });

export type EmbedRequest = z.infer<typeof embedRequestSchema>;

/** Parse and validate a request document, throwing a readable error. */
export function parseEmbedRequest(doc: unknown): EmbedRequest {
  const result = embedRequestSchema.safeParse(doc);
  if (!result.success) {
    const lines = result.error.issues.map(
      (issue) => `${issue.path.join(".") || "<root>"}: ${issue.message}`
    );
    throw new RequestError(`invalid embed request\n  ${lines.join("\n  ")}`);
  }
  return result.data;
}

export class RequestError extends Error {}
